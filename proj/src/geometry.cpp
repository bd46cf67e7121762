#include "pbco/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pbco {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

void ProblemConfig::validate() const {
  require(d >= 1, "ProblemConfig: d must be >= 1");
  require(T >= 1, "ProblemConfig: T must be >= 1");
  require(W > 0.0, "ProblemConfig: W must be positive");
  require(D > 0.0, "ProblemConfig: D must be positive");
  require(C > 0.0, "ProblemConfig: C must be positive");
  require(L > 0.0, "ProblemConfig: L must be positive");
  require(alpha_W < beta_W, "ProblemConfig: alpha_W must be < beta_W");
  require(loss_floor <= 0.0 || loss_floor < C,
          "ProblemConfig: loss_floor must be below C");
}

ProblemConfig ProblemConfig::linear_link(int d, long T, double W, double D,
                                         double C, double L) {
  ProblemConfig cfg;
  cfg.d = d;
  cfg.T = T;
  cfg.W = W;
  cfg.D = D;
  cfg.C = C;
  cfg.L = L;
  cfg.alpha_W = -D * W;
  cfg.beta_W = D * W;
  cfg.validate();
  return cfg;
}

ParameterNet::ParameterNet(Matrix points, double step)
    : points_(std::move(points)), step_(step) {}

int PredictionRange::bin_index(double y) const {
  // Edge values go to the lower bin (ceil semantics), hi to the last bin,
  // and anything outside [lo, hi] clamps.
  const double t = (y - lo) / bin_width();
  int k = static_cast<int>(std::ceil(t)) - 1;
  if (k < 0) k = 0;
  if (k >= bins) k = bins - 1;
  return k;
}

Vector project_ball(const Vector& w, double R) {
  require(R > 0.0, "project_ball: radius must be positive");
  if (!w.allFinite()) {
    throw std::invalid_argument("project_ball: non-finite input coordinates");
  }
  const double norm = w.norm();
  if (norm <= R) return w;
  return w * (R / norm);
}

namespace {

// Depth-first enumeration of the grid, pruning prefixes that already leave
// the ball. Keeps lexicographic order.
void enumerate_net(const std::vector<double>& axis, int d, double radius_sq,
                   int max_points, std::vector<double>& prefix,
                   double prefix_sq, std::vector<Vector>& out) {
  const int depth = static_cast<int>(prefix.size());
  if (depth == d) {
    if (static_cast<int>(out.size()) >= max_points) {
      throw std::runtime_error(
          "build_net: net exceeds the maximum of " +
          std::to_string(max_points) + " points");
    }
    Vector p(d);
    for (int i = 0; i < d; ++i) p[i] = prefix[i];
    out.push_back(std::move(p));
    return;
  }
  for (double v : axis) {
    const double sq = prefix_sq + v * v;
    if (sq > radius_sq) continue;
    prefix.push_back(v);
    enumerate_net(axis, d, radius_sq, max_points, prefix, sq, out);
    prefix.pop_back();
  }
}

}  // namespace

ParameterNet build_net(const ProblemConfig& config, double step,
                       int max_points) {
  config.validate();
  require(step > 0.0 && step <= 2.0 * config.W,
          "build_net: step must lie in (0, 2W]");
  require(max_points >= 1, "build_net: max_points must be >= 1");

  const double W = config.W;
  const int n_axis = static_cast<int>(std::floor(2.0 * W / step + 1e-9)) + 1;
  std::vector<double> axis(n_axis);
  for (int i = 0; i < n_axis; ++i) axis[i] = -W + i * step;

  // Tolerance admits axis extremes that land on the sphere up to rounding.
  const double radius_sq = W * W * (1.0 + 1e-12) + 1e-300;
  std::vector<Vector> pts;
  std::vector<double> prefix;
  prefix.reserve(config.d);
  enumerate_net(axis, config.d, radius_sq, max_points, prefix, 0.0, pts);

  Matrix m(config.d, static_cast<int>(pts.size()));
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) m.col(i) = pts[i];
  return ParameterNet(std::move(m), step);
}

double finest_step_within(const ProblemConfig& config, int budget,
                          int max_subdivisions) {
  require(budget >= 1, "finest_step_within: budget must be >= 1");
  auto fits = [&](int k) {
    try {
      build_net(config, 2.0 * config.W / k, budget);
      return true;
    } catch (const std::runtime_error&) {
      return false;
    }
  };
  if (!fits(2)) {
    throw std::runtime_error(
        "finest_step_within: no grid with at most " + std::to_string(budget) +
        " points");
  }
  int lo = 2, hi = 2;
  while (hi < max_subdivisions && fits(hi * 2)) {
    hi *= 2;
  }
  lo = hi;
  hi = std::min(hi * 2, max_subdivisions);
  // Largest k in [lo, hi] that fits; lo fits by construction.
  while (lo + 1 < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (fits(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (lo + 1 <= hi && fits(hi)) lo = hi;
  return 2.0 * config.W / lo;
}

PredictionRange prediction_range_of(const Vector& predictions, int bins) {
  require(bins >= 1, "prediction_range: bins must be >= 1");
  require(predictions.size() > 0, "prediction_range: empty net");
  if (!predictions.allFinite()) {
    throw std::invalid_argument("prediction_range: non-finite predictions");
  }
  PredictionRange r;
  r.lo = predictions.minCoeff();
  r.hi = predictions.maxCoeff();
  r.bins = bins;
  if (r.hi <= r.lo) r.hi = r.lo + 1e-9;
  return r;
}

PredictionRange prediction_range(const ParameterNet& net, const Vector& x,
                                 int bins) {
  require(net.size() > 0, "prediction_range: empty net");
  if (!x.allFinite()) {
    throw std::invalid_argument("prediction_range: non-finite context");
  }
  return prediction_range_of(net.predictions(x), bins);
}

Vector project_W_alpha(const Vector& w, const Vector& x,
                       const ProblemConfig& config, double alpha) {
  config.validate();
  const double half_span = 0.5 * (config.beta_W - config.alpha_W);
  require(alpha >= 0.0 && alpha < half_span,
          "project_W_alpha: alpha must lie in [0, (beta_W - alpha_W)/2)");
  if (!w.allFinite() || !x.allFinite()) {
    throw std::invalid_argument("project_W_alpha: non-finite input");
  }
  const double lo = config.alpha_W + alpha;
  const double hi = config.beta_W - alpha;
  const double xx = x.squaredNorm();
  if (xx == 0.0) {
    // Every w predicts 0; the slab is all of R^d or empty.
    if (lo <= 0.0 && 0.0 <= hi) return project_ball(w, config.W);
    throw std::runtime_error("project_W_alpha: slab/ball intersection empty");
  }
  // The slab point closest to the origin decides feasibility.
  const double nearest = std::clamp(0.0, lo, hi);
  if (std::abs(nearest) / std::sqrt(xx) > config.W * (1.0 + 1e-12)) {
    throw std::runtime_error("project_W_alpha: slab/ball intersection empty");
  }

  Vector v = w;
  for (int it = 0; it < 100; ++it) {
    const Vector prev = v;
    const double g = v.dot(x);
    const double gc = std::clamp(g, lo, hi);
    if (g != gc) v -= x * ((g - gc) / xx);
    v = project_ball(v, config.W);
    const double moved = (v - prev).norm();
    const double pred = v.dot(x);
    const bool feasible = pred >= lo - 1e-9 && pred <= hi + 1e-9;
    if (moved < 1e-9 && feasible) break;
  }
  return v;
}

}  // namespace pbco
