#include "pbco/kernel1d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pbco {

namespace {

// Overlap length of [a, b] and [c, d].
double overlap(double a, double b, double c, double d) {
  return std::max(0.0, std::min(b, d) - std::max(a, c));
}

// Integral over y' in [p, q] (sources above the mean, p >= ybar + eps) of
// |[s, e] ∩ [ybar, y']| / (y' - ybar).
double seg_mass_above(double p, double q, double s, double e, double ybar) {
  if (q <= p) return 0.0;
  const double u = std::max(s, ybar);
  if (e <= u) return 0.0;
  double total = 0.0;
  // Partially covered bin: u < y' < e, overlap grows as y' - u.
  const double a1 = std::max(p, u), b1 = std::min(q, e);
  if (b1 > a1) {
    total += (b1 - a1) - (u - ybar) * std::log((b1 - ybar) / (a1 - ybar));
  }
  // Fully covered: y' >= e, overlap stays e - u.
  const double a2 = std::max(p, e), b2 = q;
  if (b2 > a2) {
    total += (e - u) * std::log((b2 - ybar) / (a2 - ybar));
  }
  return total;
}

// Mirror image: sources below the mean, q <= ybar - eps, integral of
// |[s, e] ∩ [y', ybar]| / (ybar - y').
double seg_mass_below(double p, double q, double s, double e, double ybar) {
  if (q <= p) return 0.0;
  const double v = std::min(e, ybar);
  if (s >= v) return 0.0;
  double total = 0.0;
  const double a1 = std::max(p, s), b1 = std::min(q, v);
  if (b1 > a1) {
    total += (b1 - a1) - (ybar - v) * std::log((ybar - a1) / (ybar - b1));
  }
  const double a2 = p, b2 = std::min(q, s);
  if (b2 > a2) {
    total += (v - s) * std::log((ybar - a2) / (ybar - b2));
  }
  return total;
}

// Squared-kernel versions: one extra factor 1 / |y' - ybar| in the integrand.
double seg_sq_above(double p, double q, double s, double e, double ybar) {
  if (q <= p) return 0.0;
  const double u = std::max(s, ybar);
  if (e <= u) return 0.0;
  double total = 0.0;
  const double a1 = std::max(p, u), b1 = std::min(q, e);
  if (b1 > a1) {
    total += std::log((b1 - ybar) / (a1 - ybar)) +
             (ybar - u) * (1.0 / (a1 - ybar) - 1.0 / (b1 - ybar));
  }
  const double a2 = std::max(p, e), b2 = q;
  if (b2 > a2) {
    total += (e - u) * (1.0 / (a2 - ybar) - 1.0 / (b2 - ybar));
  }
  return total;
}

double seg_sq_below(double p, double q, double s, double e, double ybar) {
  if (q <= p) return 0.0;
  const double v = std::min(e, ybar);
  if (s >= v) return 0.0;
  double total = 0.0;
  const double a1 = std::max(p, s), b1 = std::min(q, v);
  if (b1 > a1) {
    total += std::log((ybar - a1) / (ybar - b1)) -
             (ybar - v) * (1.0 / (ybar - b1) - 1.0 / (ybar - a1));
  }
  const double a2 = p, b2 = std::min(q, s);
  if (b2 > a2) {
    total += (v - s) * (1.0 / (ybar - b2) - 1.0 / (ybar - a2));
  }
  return total;
}

// Flat-branch kernel mass landing in bin j per unit of source length, with
// the part of [ybar - eps, ybar] hanging below the range clamped into bin 0.
double eps_column(const PredictionRange& range, double ybar, double eps,
                  int j) {
  double m =
      overlap(range.bin_left(j), range.bin_right(j), ybar - eps, ybar);
  if (j == 0) m += std::clamp(range.lo - (ybar - eps), 0.0, eps);
  return m / eps;
}

// Walks every (source bin, target bin) pair with nonzero kernel mass and
// feeds the exact integrals to `add(j, value)`. With only_bin >= 0 restricts
// targets to that single bin.
template <bool Squared, class Sink>
void accumulate(const BinnedDensity& q, double eps, double ybar, Sink&& add,
                int only_bin) {
  const PredictionRange& range = q.range;
  const int M = range.bins;
  const double h = range.bin_width();

  auto bin_near = [&](double y) {
    return std::clamp(static_cast<int>(std::floor((y - range.lo) / h)), 0,
                      M - 1);
  };
  auto targets = [&](double a, double b, int& from, int& to) {
    // Pad by one bin; the closed forms return 0 outside the true support.
    from = only_bin >= 0 ? only_bin : std::max(0, bin_near(a) - 1);
    to = only_bin >= 0 ? only_bin : std::min(M - 1, bin_near(b) + 1);
  };

  const int ybar_bin = bin_near(ybar);

  for (int k = 0; k < M; ++k) {
    const double mk = q.mass[k];
    if (mk <= 0.0) continue;
    const double weight = mk / h;
    const double a = range.bin_left(k), b = range.bin_right(k);

    const double eps_len = overlap(a, b, ybar - eps, ybar + eps);
    if (eps_len > 0.0) {
      const double w = weight * eps_len * (Squared ? 1.0 / eps : 1.0);
      int from, to;
      targets(std::max(range.lo, ybar - eps), ybar, from, to);
      for (int j = from; j <= to; ++j) {
        const double c = eps_column(range, ybar, eps, j);
        if (c != 0.0) add(j, w * c);
      }
      if (only_bin <= 0 && from > 0) {
        // Clamped overhang always lands in bin 0.
        const double c0 = std::clamp(range.lo - (ybar - eps), 0.0, eps) / eps;
        if (c0 != 0.0) add(0, w * c0);
      }
    }

    const double up_p = std::max(a, ybar + eps), up_q = b;
    if (up_q > up_p) {
      int from, to;
      targets(ybar, up_q, from, to);
      from = only_bin >= 0 ? from : std::min(from, std::max(0, ybar_bin - 1));
      for (int j = from; j <= to; ++j) {
        const double s = range.bin_left(j), e = range.bin_right(j);
        const double v = Squared ? seg_sq_above(up_p, up_q, s, e, ybar)
                                 : seg_mass_above(up_p, up_q, s, e, ybar);
        if (v != 0.0) add(j, weight * v);
      }
    }

    const double dn_p = a, dn_q = std::min(b, ybar - eps);
    if (dn_q > dn_p) {
      int from, to;
      targets(dn_p, ybar, from, to);
      to = only_bin >= 0 ? to : std::max(to, std::min(M - 1, ybar_bin + 1));
      for (int j = from; j <= to; ++j) {
        const double s = range.bin_left(j), e = range.bin_right(j);
        const double v = Squared ? seg_sq_below(dn_p, dn_q, s, e, ybar)
                                 : seg_mass_below(dn_p, dn_q, s, e, ybar);
        if (v != 0.0) add(j, weight * v);
      }
    }
  }
}

}  // namespace

void BinnedDensity::validate(double tol) const {
  if (mass.size() != range.bins) {
    throw std::invalid_argument("BinnedDensity: mass size != bin count");
  }
  if (mass.size() == 0 || !mass.allFinite() || mass.minCoeff() < -tol) {
    throw std::invalid_argument("BinnedDensity: negative or non-finite mass");
  }
  if (std::abs(mass.sum() - 1.0) > tol) {
    throw std::invalid_argument("BinnedDensity: masses must sum to 1");
  }
}

double mean_of(const BinnedDensity& q) {
  double m = 0.0;
  for (int k = 0; k < q.range.bins; ++k) {
    m += q.mass[k] * q.range.bin_center(k);
  }
  return m;
}

double kernel_eval(double y, double y_prime, const KernelParams& kp) {
  const double dist = std::abs(y_prime - kp.y_bar);
  if (dist >= kp.eps) {
    const double a = std::min(y_prime, kp.y_bar);
    const double b = std::max(y_prime, kp.y_bar);
    return (y >= a && y <= b) ? 1.0 / dist : 0.0;
  }
  return (y >= kp.y_bar - kp.eps && y <= kp.y_bar) ? 1.0 / kp.eps : 0.0;
}

BinnedDensity smooth(const BinnedDensity& q, double eps) {
  q.validate();
  if (eps <= 0.0) throw std::invalid_argument("smooth: eps must be positive");
  BinnedDensity out;
  out.range = q.range;
  out.mass = Vector::Zero(q.range.bins);
  accumulate<false>(
      q, eps, mean_of(q), [&](int j, double v) { out.mass[j] += v; }, -1);
  return out;
}

double smoothed_mass_in_bin(const BinnedDensity& q, double eps, int j) {
  if (j < 0 || j >= q.range.bins) {
    throw std::invalid_argument("smoothed_mass_in_bin: bin out of range");
  }
  double total = 0.0;
  accumulate<false>(
      q, eps, mean_of(q), [&](int, double v) { total += v; }, j);
  return total;
}

Vector smooth_squared_bins(const BinnedDensity& q, double eps) {
  q.validate();
  if (eps <= 0.0) {
    throw std::invalid_argument("smooth_squared_bins: eps must be positive");
  }
  Vector out = Vector::Zero(q.range.bins);
  accumulate<true>(
      q, eps, mean_of(q), [&](int j, double v) { out[j] += v; }, -1);
  return out;
}

double sample_smoothed(const BinnedDensity& q, double eps, Rng& rng) {
  q.validate();
  if (eps <= 0.0) {
    throw std::invalid_argument("sample_smoothed: eps must be positive");
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  // Bin of y'; the walk guards against rounding in the cumulative sum.
  const double u1 = unif(rng);
  int k = q.range.bins - 1;
  double acc = 0.0;
  for (int i = 0; i < q.range.bins; ++i) {
    acc += q.mass[i];
    if (u1 <= acc) {
      k = i;
      break;
    }
  }
  while (k > 0 && q.mass[k] <= 0.0) --k;

  const double y_prime = q.range.bin_left(k) + unif(rng) * q.bin_width();
  const double ybar = mean_of(q);
  if (std::abs(y_prime - ybar) >= eps) {
    const double a = std::min(y_prime, ybar), b = std::max(y_prime, ybar);
    return a + unif(rng) * (b - a);
  }
  return (ybar - eps) + unif(rng) * eps;
}

double adjoint(const std::function<double(double)>& loss, double y,
               const KernelParams& kp, int quad_points) {
  if (quad_points < 1) {
    throw std::invalid_argument("adjoint: quad_points must be >= 1");
  }
  double a, b;
  if (std::abs(y - kp.y_bar) >= kp.eps) {
    a = std::min(y, kp.y_bar);
    b = std::max(y, kp.y_bar);
  } else {
    a = kp.y_bar - kp.eps;
    b = kp.y_bar;
  }
  const double step = (b - a) / quad_points;
  double sum = 0.0;
  for (int i = 0; i < quad_points; ++i) {
    const double v = loss(a + (i + 0.5) * step);
    if (!std::isfinite(v)) {
      throw std::invalid_argument("adjoint: loss not finite on the segment");
    }
    sum += v;
  }
  return sum / quad_points;
}

double loss_estimate(double observed_loss, double y_t, double density_at_y_t,
                     double y, const KernelParams& kp) {
  if (!(density_at_y_t > 0.0)) {
    throw std::runtime_error(
        "loss_estimate: sampling density at y_t must be positive");
  }
  return observed_loss / density_at_y_t * kernel_eval(y_t, y, kp);
}

double variance_ratio_bound(const PredictionRange& range, double eps) {
  return 2.0 * (1.0 + std::log(1.0 / eps) + std::log(range.hi - range.lo));
}

double variance_ratio_integral(const BinnedDensity& q, double eps) {
  const BinnedDensity s1 = smooth(q, eps);
  const Vector s2 = smooth_squared_bins(q, eps);
  double total = 0.0;
  for (int j = 0; j < q.range.bins; ++j) {
    if (s1.mass[j] <= 0.0) continue;  // squared mass vanishes there too
    total += q.bin_width() * s2[j] / s1.mass[j];
  }
  return total;
}

}  // namespace pbco
