#pragma once

#include <functional>

#include "pbco/geometry.hpp"

namespace pbco {

/// Piecewise-constant probability density over a binned prediction range.
/// `mass[k]` is the probability of bin k; the density at y is
/// mass[bin(y)] / bin_width.
struct BinnedDensity {
  PredictionRange range;
  Vector mass;

  double bin_width() const { return range.bin_width(); }
  double density_at(double y) const {
    return mass[range.bin_index(y)] / bin_width();
  }
  // Throws when masses are negative or do not sum to 1 within `tol`.
  void validate(double tol = 1e-9) const;
};

/// Parameters of the one-dimensional smoothing kernel: the mean of the
/// underlying measure and the width of the flat fallback branch.
struct KernelParams {
  double y_bar = 0.0;
  double eps = 1e-3;
};

// Mean of a binned density, sum_k mass[k] * center[k].
double mean_of(const BinnedDensity& q);

inline KernelParams kernel_params_for(const BinnedDensity& q, double eps) {
  return KernelParams{mean_of(q), eps};
}

// Kernel density K(y | y') of Definition-style two-branch smoothing: when
// |y' - y_bar| >= eps, uniform on the closed interval between y' and y_bar;
// otherwise uniform on [y_bar - eps, y_bar]. The boundary |y' - y_bar| == eps
// uses the interval branch.
double kernel_eval(double y, double y_prime, const KernelParams& kp);

// Exact integral over [a_src, b_src] (source values y', weighted uniformly)
// of the kernel mass landing in [s, e]. Mass that falls below `floor_lo`
// (the bottom of the binned range) is NOT included here; see
// smooth() for how it is clamped into bin 0. Used internally and by tests.

// Binned law of y when y' ~ q (uniform within its bin) and y | y' follows the
// kernel. Mass falling below the range is clamped into bin 0, so the result
// is a valid BinnedDensity (masses sum to 1 up to rounding).
BinnedDensity smooth(const BinnedDensity& q, double eps);

// Single bin of smooth(q, eps), computed by the same closed forms. The j-th
// value of smooth(q, eps).mass without building the full vector.
double smoothed_mass_in_bin(const BinnedDensity& q, double eps, int j);

// Bin integrals of the squared kernel applied to q (not a probability).
// Backs the variance-ratio bound.
Vector smooth_squared_bins(const BinnedDensity& q, double eps);

// Draws y ~ smooth(q, eps) by the two-stage process: a bin of q, a uniform
// y' within it, then a uniform y on the kernel support for y'.
double sample_smoothed(const BinnedDensity& q, double eps, Rng& rng);

// Average of `loss` over the kernel support for source y: the segment
// between y and y_bar when |y - y_bar| >= eps, else [y_bar - eps, y_bar].
// Midpoint quadrature with `quad_points` nodes (exact for linear losses).
double adjoint(const std::function<double(double)>& loss, double y,
               const KernelParams& kp, int quad_points = 64);

// Importance-weighted single-evaluation loss estimate at y, given the loss
// observed at the sampled y_t and the sampling density there. Throws when
// density_at_y_t <= 0.
double loss_estimate(double observed_loss, double y_t, double density_at_y_t,
                     double y, const KernelParams& kp);

// Integral over the range of (squared-kernel density) / (kernel density);
// bins where the kernel density vanishes contribute zero.
double variance_ratio_integral(const BinnedDensity& q, double eps);

// Variance bound 2 (1 + ln(1/eps) + ln(hi - lo)) that the ratio integral
// must respect.
double variance_ratio_bound(const PredictionRange& range, double eps);

}  // namespace pbco
