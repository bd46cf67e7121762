#include "pbco/ogd.hpp"

#include <cmath>
#include <stdexcept>

namespace pbco {

OgdParams ogd_defaults(const ProblemConfig& config) {
  config.validate();
  OgdParams p;
  const double sqrt_t = std::sqrt(static_cast<double>(config.T));
  p.delta = std::sqrt(config.W * config.D * config.C / (3.0 * config.L * sqrt_t));
  p.eta = config.W * p.delta / (config.D * config.C * sqrt_t);
  p.alpha = p.delta;
  // Keep the slab nonempty for tiny horizons.
  const double half_span = 0.5 * (config.beta_W - config.alpha_W);
  if (p.alpha >= half_span) p.alpha = 0.5 * half_span;
  return p;
}

OgdParams flaxman_defaults(const ProblemConfig& config) {
  config.validate();
  OgdParams p;
  const double sqrt_t = std::sqrt(static_cast<double>(config.T));
  const double dd = static_cast<double>(config.d);
  p.delta = std::sqrt(config.W * dd * config.D * config.C /
                      (3.0 * config.L * sqrt_t));
  if (p.delta > 0.5 * config.W) p.delta = 0.5 * config.W;
  p.eta = config.W * p.delta / (dd * config.D * config.C * sqrt_t);
  p.alpha = p.delta;
  return p;
}

Vector one_point_gradient(double observed_loss, int u, double delta,
                          const Vector& grad_g) {
  if (delta <= 0.0) {
    throw std::invalid_argument("one_point_gradient: delta must be positive");
  }
  if (u != 1 && u != -1) {
    throw std::invalid_argument("one_point_gradient: u must be +1 or -1");
  }
  return (observed_loss * u / delta) * grad_g;
}

OgdState make_ogd_state(int d) {
  OgdState s;
  s.w = Vector::Zero(d);
  return s;
}

namespace {

void check_loss(double loss, const ProblemConfig& config, const char* who) {
  if (!std::isfinite(loss) || loss < config.loss_floor - 1e-9 ||
      loss > config.C + 1e-9) {
    throw std::runtime_error(std::string(who) +
                             ": loss oracle broke its declared range");
  }
}

}  // namespace

OgdStepResult ogd_step(OgdState& state, const Vector& x_t,
                       const LossOracle& loss_oracle, const OgdParams& params,
                       const ProblemConfig& config, Rng& rng) {
  if (params.eta <= 0.0 || params.delta <= 0.0 || params.alpha < 0.0) {
    throw std::invalid_argument("ogd_step: bad parameters");
  }
  std::uniform_int_distribution<int> coin(0, 1);
  const int u = coin(rng) == 0 ? -1 : 1;

  state.w = project_W_alpha(state.w, x_t, config, params.alpha);

  OgdStepResult out;
  out.a_t = state.w.dot(x_t) + params.delta * u;
  out.incurred_loss = loss_oracle(out.a_t);
  check_loss(out.incurred_loss, config, "ogd_step");

  // Descent step stays unprojected until the next round begins.
  state.w -= params.eta *
             one_point_gradient(out.incurred_loss, u, params.delta, x_t);
  return out;
}

FlaxmanStepResult flaxman_step(OgdState& state,
                               const FullLossOracle& loss_oracle,
                               const OgdParams& params,
                               const ProblemConfig& config, Rng& rng) {
  if (params.eta <= 0.0 || params.delta <= 0.0) {
    throw std::invalid_argument("flaxman_step: bad parameters");
  }
  const double xi = params.delta / config.W;
  if (xi >= 1.0) {
    throw std::invalid_argument("flaxman_step: delta must be below W");
  }
  const double shrunk = (1.0 - xi) * config.W;

  state.w = project_ball(state.w, shrunk);
  const Vector u = sample_unit_sphere(config.d, rng);

  FlaxmanStepResult out;
  out.w_played = state.w + params.delta * u;
  out.incurred_loss = loss_oracle(out.w_played);
  check_loss(out.incurred_loss, config, "flaxman_step");

  const Vector grad =
      (config.d / params.delta) * out.incurred_loss * u;
  state.w = project_ball(state.w - params.eta * grad, shrunk);
  return out;
}

Vector sample_unit_sphere(int d, Rng& rng) {
  if (d < 1) throw std::invalid_argument("sample_unit_sphere: d must be >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(d);
  double norm = 0.0;
  do {
    for (int i = 0; i < d; ++i) v[i] = gauss(rng);
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

Vector sample_in_ball(int d, double R, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Vector dir = sample_unit_sphere(d, rng);
  const double r = R * std::pow(unif(rng), 1.0 / d);
  return r * dir;
}

}  // namespace pbco
