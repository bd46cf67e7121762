#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pbco/geometry.hpp"
#include "pbco/kernel1d.hpp"
#include "pbco/kexp.hpp"

namespace pbco {

/// Outcome of one verification check.
struct CheckReport {
  std::string name;
  bool pass = false;
  double max_dev = 0.0;
  std::string detail;
};

/// Convex piecewise-linear function with exact pointwise evaluation, exact
/// interval averages and a known Lipschitz constant. The kernel-property
/// checks need these quantities exactly, not through quadrature.
class PiecewiseLinearLoss {
 public:
  // knots strictly increasing, one value per knot; linear extension outside.
  PiecewiseLinearLoss(std::vector<double> knots, std::vector<double> values);

  double operator()(double y) const;
  double average_on(double a, double b) const;  // exact mean over [a, b]
  double lipschitz() const;
  bool convex(double tol = 1e-12) const;

  // Random convex instance with slopes in [-L, L], nonnegative on [lo, hi].
  static PiecewiseLinearLoss random(Rng& rng, double lo, double hi, double L);

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
};

// Exact adjoint (segment average) of a piecewise-linear loss.
double adjoint_exact(const PiecewiseLinearLoss& loss, double y,
                     const KernelParams& kp);

// Enumerates the bins of smooth(q) as the exact law of y_t, forms the
// importance-weighted estimate at every bin edge, and compares with
// adjoint(loss, y). Exact (well under 1e-6) when the mean of q sits on a bin
// edge and the loss is linear; otherwise reports the discretization error.
CheckReport check_estimator_unbiased(const BinnedDensity& q,
                                     const std::function<double(double)>& loss,
                                     double eps, double tolerance);

// The segment estimator identity: the exact u-average of the one-point
// estimator against the analytic derivative of the interval-smoothed loss,
// plus a seeded Monte-Carlo run reporting its standard error.
CheckReport check_gradient_identity(const std::function<double(double)>& loss,
                                    double y, double delta, long samples,
                                    uint64_t seed);

// Sphere-sampling analogue in d dimensions for f(w) = ||w||^2, whose
// ball-smoothed gradient is exactly 2w: the Monte-Carlo mean of
// (d/delta) f(w + delta u) u must match per coordinate within 3 standard
// errors.
CheckReport check_sphere_gradient(const Vector& w, double delta, long samples,
                                  uint64_t seed);

// Kernel properties on a given (q, eps, loss): adjoint Lipschitz ratio over
// all bin-center pairs, the convex-domination inequality with slack 3*eps*L,
// and the variance-ratio integral against its logarithmic bound.
CheckReport check_kernel_properties(const BinnedDensity& q, double eps,
                                    const PiecewiseLinearLoss& loss, double L,
                                    double tolerance = 1e-6);

// Exact identity between net-space and bin-space inner products for
// estimates that are constant per bin.
CheckReport check_pq_duality(const WeightVector& p, const ParameterNet& net,
                             const Vector& x, const Vector& estimator_values);

// Random strictly-positive density on `bins` cells over [lo, hi].
BinnedDensity random_density(Rng& rng, int bins, double lo, double hi);

// Moves a little mass between the outer bins so mean_of(q) lands exactly on
// a bin edge near the middle; the regime where the discrete estimator
// identity is exact. Throws when the outer bins cannot absorb the transfer.
BinnedDensity align_mean_to_edge(BinnedDensity q);

// random_density + align_mean_to_edge, redrawing until the transfer fits.
BinnedDensity aligned_density(Rng& rng, int bins, double lo, double hi);

// The preflight battery behind the `verify` subcommand.
std::vector<CheckReport> run_preflight(uint64_t seed);

}  // namespace pbco
