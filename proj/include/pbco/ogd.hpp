#pragma once

#include <functional>

#include "pbco/geometry.hpp"

namespace pbco {

/// Step size, perturbation and projection margin of the gradient-descent
/// learners.
struct OgdParams {
  double eta = 1e-3;
  double delta = 1e-2;
  double alpha = 1e-2;
};

// delta = sqrt(W D C / (3 L sqrt(T))), eta = W delta / (D C sqrt(T)),
// alpha = delta. The margin is clamped below half the prediction span so the
// slab stays nonempty.
OgdParams ogd_defaults(const ProblemConfig& config);

// Tuning for the structure-agnostic sphere-sampling baseline, mirroring the
// same balance with gradient bound d D C / delta:
// delta = sqrt(W d D C / (3 L sqrt(T))) clamped to W/2,
// eta = W delta / (d D C sqrt(T)).
OgdParams flaxman_defaults(const ProblemConfig& config);

// (1/delta) * observed_loss * u * grad_g, the single-evaluation estimate of
// the scalar loss derivative times the known link gradient.
Vector one_point_gradient(double observed_loss, int u, double delta,
                          const Vector& grad_g);

/// Current iterate of a gradient-descent learner.
struct OgdState {
  Vector w;
};

OgdState make_ogd_state(int d);

struct OgdStepResult {
  double a_t = 0.0;
  double incurred_loss = 0.0;
};

using LossOracle = std::function<double(double)>;
using FullLossOracle = std::function<double(const Vector&)>;

// One round: project onto the margin slab, play <w, x> + delta*u for a coin
// u, query the loss once, and take an unprojected descent step (projection
// happens at the start of the next round).
OgdStepResult ogd_step(OgdState& state, const Vector& x_t,
                       const LossOracle& loss_oracle, const OgdParams& params,
                       const ProblemConfig& config, Rng& rng);

struct FlaxmanStepResult {
  Vector w_played;
  double incurred_loss = 0.0;
};

// Sphere-sampling baseline: perturb the iterate in parameter space, estimate
// the d-dimensional gradient as (d/delta) f(w + delta u) u, stay on the
// (1 - delta/W)-shrunk ball.
FlaxmanStepResult flaxman_step(OgdState& state,
                               const FullLossOracle& loss_oracle,
                               const OgdParams& params,
                               const ProblemConfig& config, Rng& rng);

// Uniform draw from the unit sphere in d dimensions.
Vector sample_unit_sphere(int d, Rng& rng);

// Uniform draw from the ball of radius R in d dimensions.
Vector sample_in_ball(int d, double R, Rng& rng);

}  // namespace pbco
