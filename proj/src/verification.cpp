#include "pbco/verification.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pbco/environments.hpp"
#include "pbco/ogd.hpp"

namespace pbco {

PiecewiseLinearLoss::PiecewiseLinearLoss(std::vector<double> knots,
                                         std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  if (knots_.size() < 2 || knots_.size() != values_.size()) {
    throw std::invalid_argument("PiecewiseLinearLoss: need matching knots");
  }
  for (size_t i = 1; i < knots_.size(); ++i) {
    if (knots_[i] <= knots_[i - 1]) {
      throw std::invalid_argument("PiecewiseLinearLoss: knots must increase");
    }
  }
}

double PiecewiseLinearLoss::operator()(double y) const {
  const size_t n = knots_.size();
  size_t i;
  if (y <= knots_.front()) {
    i = 0;
  } else if (y >= knots_.back()) {
    i = n - 2;
  } else {
    i = std::upper_bound(knots_.begin(), knots_.end(), y) - knots_.begin() - 1;
  }
  const double slope =
      (values_[i + 1] - values_[i]) / (knots_[i + 1] - knots_[i]);
  return values_[i] + slope * (y - knots_[i]);
}

double PiecewiseLinearLoss::average_on(double a, double b) const {
  if (b < a) std::swap(a, b);
  if (b == a) return (*this)(a);
  // Trapezoid pieces between consecutive breakpoints inside [a, b].
  double integral = 0.0;
  double x0 = a, f0 = (*this)(a);
  for (double k : knots_) {
    if (k <= x0 || k >= b) continue;
    const double fk = (*this)(k);
    integral += 0.5 * (f0 + fk) * (k - x0);
    x0 = k;
    f0 = fk;
  }
  integral += 0.5 * (f0 + (*this)(b)) * (b - x0);
  return integral / (b - a);
}

double PiecewiseLinearLoss::lipschitz() const {
  double m = 0.0;
  for (size_t i = 0; i + 1 < knots_.size(); ++i) {
    m = std::max(m, std::abs((values_[i + 1] - values_[i]) /
                             (knots_[i + 1] - knots_[i])));
  }
  return m;
}

bool PiecewiseLinearLoss::convex(double tol) const {
  double prev = -1e300;
  for (size_t i = 0; i + 1 < knots_.size(); ++i) {
    const double s =
        (values_[i + 1] - values_[i]) / (knots_[i + 1] - knots_[i]);
    if (s < prev - tol) return false;
    prev = s;
  }
  return true;
}

PiecewiseLinearLoss PiecewiseLinearLoss::random(Rng& rng, double lo, double hi,
                                                double L) {
  std::uniform_int_distribution<int> nk(2, 5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int pieces = nk(rng);
  // Knots spread over a slightly larger interval than [lo, hi].
  const double pad = 0.25 * (hi - lo);
  std::vector<double> knots(pieces + 1);
  for (int i = 0; i <= pieces; ++i) {
    knots[i] = (lo - pad) + (hi - lo + 2 * pad) * (i + unif(rng) * 0.8) /
                                (pieces + 1);
  }
  std::sort(knots.begin(), knots.end());
  // Nondecreasing slopes in [-L, L] keep the function convex and Lipschitz.
  std::vector<double> slopes(pieces);
  for (int i = 0; i < pieces; ++i) slopes[i] = L * (2.0 * unif(rng) - 1.0);
  std::sort(slopes.begin(), slopes.end());
  std::vector<double> values(pieces + 1);
  values[0] = unif(rng);
  for (int i = 0; i < pieces; ++i) {
    values[i + 1] = values[i] + slopes[i] * (knots[i + 1] - knots[i]);
  }
  PiecewiseLinearLoss f(knots, values);
  // Shift so the function is nonnegative on [lo - pad, hi + pad].
  double min_v = std::min(f(lo - pad), f(hi + pad));
  for (int i = 0; i <= pieces; ++i) min_v = std::min(min_v, values[i]);
  for (double& v : values) v -= std::min(0.0, min_v);
  return PiecewiseLinearLoss(std::move(knots), std::move(values));
}

double adjoint_exact(const PiecewiseLinearLoss& loss, double y,
                     const KernelParams& kp) {
  if (std::abs(y - kp.y_bar) >= kp.eps) {
    return loss.average_on(std::min(y, kp.y_bar), std::max(y, kp.y_bar));
  }
  return loss.average_on(kp.y_bar - kp.eps, kp.y_bar);
}

CheckReport check_estimator_unbiased(const BinnedDensity& q,
                                     const std::function<double(double)>& loss,
                                     double eps, double tolerance) {
  q.validate();
  const BinnedDensity s = smooth(q, eps);
  const KernelParams kp = kernel_params_for(q, eps);
  const PredictionRange& r = q.range;
  const double h = r.bin_width();

  double max_dev = 0.0;
  for (int i = 0; i <= r.bins; ++i) {
    const double y = r.bin_left(std::min(i, r.bins - 1)) +
                     (i == r.bins ? h : 0.0);
    double expected = 0.0;
    for (int j = 0; j < r.bins; ++j) {
      if (s.mass[j] <= 0.0) continue;  // unreachable for the sampler
      const double dens = s.mass[j] / h;
      expected +=
          s.mass[j] * loss(r.bin_center(j)) / dens * kernel_eval(r.bin_center(j), y, kp);
    }
    const double reference = adjoint(loss, y, kp);
    max_dev = std::max(max_dev, std::abs(expected - reference));
  }

  CheckReport rep;
  rep.name = "estimator-unbiased";
  rep.max_dev = max_dev;
  rep.pass = max_dev <= tolerance;
  return rep;
}

CheckReport check_gradient_identity(const std::function<double(double)>& loss,
                                    double y, double delta, long samples,
                                    uint64_t seed) {
  if (delta <= 0.0) {
    throw std::invalid_argument("check_gradient_identity: delta > 0");
  }
  // Exact u-average of the one-point estimator...
  const double est =
      0.5 * (loss(y + delta) / delta) + 0.5 * (-loss(y - delta) / delta);
  // ...and the derivative of the interval-smoothed loss
  // (1/2delta) * int_{y-delta}^{y+delta} loss, which by calculus is the same
  // two-point expression. Grouped differently on purpose.
  const double smoothed_derivative =
      (loss(y + delta) - loss(y - delta)) / (2.0 * delta);
  const double exact_dev = std::abs(est - smoothed_derivative);

  Rng rng(mix_seed(seed, 0x6AD1));
  std::uniform_int_distribution<int> coin(0, 1);
  double mc_sum = 0.0, mc_sq = 0.0;
  for (long i = 0; i < samples; ++i) {
    const int u = coin(rng) == 0 ? -1 : 1;
    const double v = loss(y + delta * u) * u / delta;
    mc_sum += v;
    mc_sq += v * v;
  }
  const double mean = mc_sum / samples;
  const double var = std::max(0.0, mc_sq / samples - mean * mean);
  const double se = std::sqrt(var / samples);
  const double mc_dev = std::abs(mean - est);

  CheckReport rep;
  rep.name = "gradient-identity";
  rep.max_dev = exact_dev;
  rep.pass = exact_dev <= 1e-12 && mc_dev <= 3.0 * se + 1e-12;
  std::ostringstream os;
  os << "exact_dev=" << exact_dev << " mc_dev=" << mc_dev << " se=" << se;
  rep.detail = os.str();
  return rep;
}

CheckReport check_sphere_gradient(const Vector& w, double delta, long samples,
                                  uint64_t seed) {
  const int d = static_cast<int>(w.size());
  Rng rng(mix_seed(seed, 0x59E7));
  Vector sum = Vector::Zero(d);
  Vector sum_sq = Vector::Zero(d);
  for (long i = 0; i < samples; ++i) {
    const Vector u = sample_unit_sphere(d, rng);
    const Vector g = (d / delta) * (w + delta * u).squaredNorm() * u;
    sum += g;
    sum_sq += g.cwiseProduct(g);
  }
  const Vector mean = sum / samples;
  const Vector target = 2.0 * w;  // gradient of the ball-smoothed ||w||^2

  CheckReport rep;
  rep.name = "sphere-gradient";
  rep.pass = true;
  for (int i = 0; i < d; ++i) {
    const double var =
        std::max(0.0, sum_sq[i] / samples - mean[i] * mean[i]);
    const double se = std::sqrt(var / samples);
    const double dev = std::abs(mean[i] - target[i]);
    rep.max_dev = std::max(rep.max_dev, dev);
    if (dev > 3.0 * se + 1e-12) rep.pass = false;
  }
  return rep;
}

CheckReport check_kernel_properties(const BinnedDensity& q, double eps,
                                    const PiecewiseLinearLoss& loss, double L,
                                    double tolerance) {
  q.validate();
  const KernelParams kp = kernel_params_for(q, eps);
  const PredictionRange& r = q.range;
  const BinnedDensity s = smooth(q, eps);

  // 1. Lipschitz ratio of the exact adjoint over all bin-center pairs.
  Vector adj(r.bins);
  for (int i = 0; i < r.bins; ++i) {
    adj[i] = adjoint_exact(loss, r.bin_center(i), kp);
  }
  double worst_ratio = 0.0;
  for (int i = 0; i < r.bins; ++i) {
    for (int j = i + 1; j < r.bins; ++j) {
      const double ratio = std::abs(adj[i] - adj[j]) /
                           (r.bin_center(j) - r.bin_center(i));
      worst_ratio = std::max(worst_ratio, ratio);
    }
  }

  // 2. Convex domination with slack 3 eps L at every bin center.
  double inner = 0.0;
  for (int j = 0; j < r.bins; ++j) {
    inner += s.mass[j] * loss.average_on(r.bin_left(j), r.bin_right(j));
  }
  double worst_slack = 1e300;
  for (int i = 0; i < r.bins; ++i) {
    const double y = r.bin_center(i);
    const double slack =
        0.5 * inner + 0.5 * loss(y) + 3.0 * eps * L - adj[i];
    worst_slack = std::min(worst_slack, slack);
  }

  // 3. Variance-ratio integral against its bound.
  const double ratio_integral = variance_ratio_integral(q, eps);
  const double bound = variance_ratio_bound(r, eps);

  CheckReport rep;
  rep.name = "kernel-properties";
  const double lip_excess = worst_ratio - L;
  const double dom_violation = -worst_slack;
  const double var_excess = ratio_integral - bound;
  rep.max_dev = std::max({lip_excess, dom_violation, var_excess, 0.0});
  rep.pass = lip_excess <= tolerance && dom_violation <= tolerance &&
             var_excess <= tolerance;
  std::ostringstream os;
  os << "lip=" << worst_ratio << "/" << L << " dom_slack=" << worst_slack
     << " var=" << ratio_integral << "/" << bound;
  rep.detail = os.str();
  return rep;
}

CheckReport check_pq_duality(const WeightVector& p, const ParameterNet& net,
                             const Vector& x, const Vector& estimator_values) {
  const int bins = static_cast<int>(estimator_values.size());
  const PredictionRange range = prediction_range(net, x, bins);
  const Eigen::VectorXi idx = bin_indices(net.predictions(x), range);
  const BinnedDensity q = marginalize_binned(p, idx, range);

  double lhs = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    lhs += p.weights[i] * estimator_values[idx[i]];
  }
  const double rhs = q.mass.dot(estimator_values);

  CheckReport rep;
  rep.name = "pq-duality";
  rep.max_dev = std::abs(lhs - rhs);
  rep.pass = rep.max_dev <= 1e-12;
  return rep;
}

BinnedDensity random_density(Rng& rng, int bins, double lo, double hi) {
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  BinnedDensity q;
  q.range.lo = lo;
  q.range.hi = hi;
  q.range.bins = bins;
  q.mass = Vector(bins);
  for (int i = 0; i < bins; ++i) q.mass[i] = unif(rng);
  q.mass /= q.mass.sum();
  return q;
}

BinnedDensity align_mean_to_edge(BinnedDensity q) {
  const PredictionRange& r = q.range;
  const double h = r.bin_width();
  const double mean = mean_of(q);
  // Nearest interior edge, kept away from the extremes.
  int e = static_cast<int>(std::round((mean - r.lo) / h));
  e = std::clamp(e, 2, r.bins - 2);
  const double target = r.bin_left(e);
  // Transfer between the outer bins moves the mean without touching the rest.
  const double span = r.bin_center(r.bins - 1) - r.bin_center(0);
  const double transfer = (target - mean) / span;
  q.mass[0] -= transfer;
  q.mass[r.bins - 1] += transfer;
  if (q.mass[0] <= 0.0 || q.mass[r.bins - 1] <= 0.0) {
    throw std::runtime_error("align_mean_to_edge: transfer exhausted a bin");
  }
  return q;
}

BinnedDensity aligned_density(Rng& rng, int bins, double lo, double hi) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    try {
      return align_mean_to_edge(random_density(rng, bins, lo, hi));
    } catch (const std::runtime_error&) {
      continue;
    }
  }
  throw std::runtime_error("aligned_density: no alignable draw in 64 tries");
}

std::vector<CheckReport> run_preflight(uint64_t seed) {
  std::vector<CheckReport> reports;
  Rng rng(mix_seed(seed, 0x93EF));

  // Kernel normalization over random densities, ranges and widths.
  {
    CheckReport rep;
    rep.name = "kernel-normalization";
    rep.pass = true;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> nbins(16, 128);
    for (int i = 0; i < 100; ++i) {
      const double lo = -2.0 + 3.0 * unif(rng);
      const double hi = lo + 0.5 + 2.5 * unif(rng);
      BinnedDensity q = random_density(rng, nbins(rng), lo, hi);
      const double eps = (hi - lo) * (0.005 + 2.0 * unif(rng));
      const BinnedDensity s = smooth(q, eps);
      const double dev = std::abs(s.mass.sum() - 1.0);
      rep.max_dev = std::max(rep.max_dev, dev);
      if (dev > 1e-9 || s.mass.minCoeff() < -1e-12) rep.pass = false;
    }
    reports.push_back(rep);
  }

  // Estimator unbiasedness in the aligned regime with linear losses.
  {
    CheckReport rep;
    rep.name = "estimator-unbiased";
    rep.pass = true;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
      const double lo = -1.5 + unif(rng);
      const double hi = lo + 1.0 + unif(rng);
      BinnedDensity q = aligned_density(rng, 64, lo, hi);
      const double h = q.bin_width();
      const double eps = (2 + (i % 4)) * h;  // multiple of the bin width
      const double a = 2.0 * unif(rng) - 1.0, b = unif(rng);
      const CheckReport sub = check_estimator_unbiased(
          q, [a, b](double y) { return a * y + b; }, eps, 1e-6);
      rep.max_dev = std::max(rep.max_dev, sub.max_dev);
      rep.pass = rep.pass && sub.pass;
    }
    reports.push_back(rep);
  }

  // Gradient identity: quadratics exactly, then a Monte-Carlo run.
  {
    CheckReport rep;
    rep.name = "gradient-identity";
    rep.pass = true;
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int i = 0; i < 5; ++i) {
      const double a = unif(rng), b = unif(rng), c = 1.5 + unif(rng);
      const double y = unif(rng), delta = 0.2 + 0.3 * std::abs(unif(rng));
      const auto quad = [a, b, c](double v) { return a * v * v + b * v + c; };
      const CheckReport sub =
          check_gradient_identity(quad, y, delta, 20000, seed + i);
      // Analytic derivative of the interval-smoothed quadratic is 2a y + b.
      const double est = (quad(y + delta) - quad(y - delta)) / (2 * delta);
      const double dev = std::abs(est - (2 * a * y + b));
      rep.max_dev = std::max({rep.max_dev, sub.max_dev, dev});
      rep.pass = rep.pass && sub.pass && dev <= 1e-12;
    }
    const CheckReport exp_rep = check_gradient_identity(
        [](double v) { return std::exp(v); }, 0.3, 0.4, 20000, seed + 11);
    rep.max_dev = std::max(rep.max_dev, exp_rep.max_dev);
    rep.pass = rep.pass && exp_rep.pass;
    reports.push_back(rep);
  }

  // Sphere-sampling gradient at d = 3.
  {
    Vector w(3);
    w << 0.3, -0.2, 0.4;
    reports.push_back(check_sphere_gradient(w, 0.25, 100000, seed));
  }

  // Kernel properties on random convex piecewise-linear losses.
  {
    CheckReport rep;
    rep.name = "kernel-properties";
    rep.pass = true;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
      const double lo = -1.5 + unif(rng);
      const double hi = lo + 1.0 + unif(rng);
      // Bins at least twice as wide as eps: the adjoint's flat branch is
      // then never finer than the grid and the pairwise ratio bound holds.
      const double eps = (hi - lo) * (0.001 + 0.006 * unif(rng));
      const int bins = static_cast<int>(std::floor((hi - lo) / (2.0 * eps)));
      const BinnedDensity q = random_density(rng, bins, lo, hi);
      const double L = 0.5 + 2.0 * unif(rng);
      const PiecewiseLinearLoss loss =
          PiecewiseLinearLoss::random(rng, lo, hi, L);
      const CheckReport sub =
          check_kernel_properties(q, eps, loss, loss.lipschitz());
      rep.max_dev = std::max(rep.max_dev, sub.max_dev);
      rep.pass = rep.pass && sub.pass;
    }
    reports.push_back(rep);
  }

  // p/q duality on random nets and estimates.
  {
    CheckReport rep;
    rep.name = "pq-duality";
    rep.pass = true;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
      ProblemConfig cfg = ProblemConfig::linear_link(2, 10, 1.0, 1.0, 1.0, 1.0);
      const ParameterNet net = build_net(cfg, 0.25 + 0.25 * unif(rng));
      Vector weights(net.size());
      for (int k = 0; k < net.size(); ++k) weights[k] = 0.05 + unif(rng);
      WeightVector p{weights / weights.sum()};
      Vector x(2);
      x << 2.0 * unif(rng) - 1.0, 2.0 * unif(rng) - 1.0;
      Vector est(32);
      for (int k = 0; k < est.size(); ++k) est[k] = 4.0 * unif(rng);
      const CheckReport sub = check_pq_duality(p, net, x, est);
      rep.max_dev = std::max(rep.max_dev, sub.max_dev);
      rep.pass = rep.pass && sub.pass;
    }
    reports.push_back(rep);
  }

  return reports;
}

}  // namespace pbco
