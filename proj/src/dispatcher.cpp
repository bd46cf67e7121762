#include "pbco/dispatcher.hpp"

#include <cmath>
#include <stdexcept>

#include "pbco/kexp.hpp"
#include "pbco/ogd.hpp"

namespace pbco {

RegimeChoice regime_for_threshold(int d, double threshold) {
  RegimeChoice c;
  c.threshold = threshold;
  c.regime = d <= threshold ? Regime::kKexp : Regime::kOgd;
  return c;
}

RegimeChoice choose_regime(const ProblemConfig& config) {
  config.validate();
  const double lprime = config.L * config.D * config.W;
  const double lt = lprime * static_cast<double>(config.T);
  if (lt <= 1.0) {
    RegimeChoice c;
    c.regime = Regime::kOgd;
    c.threshold = 0.0;
    c.log_floored = true;
    return c;
  }
  const double threshold = config.W * config.L * config.D *
                           std::sqrt(static_cast<double>(config.T)) /
                           (config.C * std::log(lt));
  return regime_for_threshold(config.d, threshold);
}

RegretTrace make_trace(const Vector& per_round_regret) {
  const long T = per_round_regret.size();
  RegretTrace tr;
  tr.cumulative.resize(T);
  tr.scaled_34.resize(T);
  tr.scaled_12.resize(T);
  double acc = 0.0;
  for (long t = 1; t <= T; ++t) {
    acc += per_round_regret[t - 1];
    tr.cumulative[t - 1] = acc;
    tr.scaled_34[t - 1] = acc / std::pow(static_cast<double>(t), 0.75);
    tr.scaled_12[t - 1] = acc / std::sqrt(static_cast<double>(t));
  }
  return tr;
}

RegretTrace mean_trace(const std::vector<RegretTrace>& traces) {
  if (traces.empty()) throw std::invalid_argument("mean_trace: no traces");
  RegretTrace out;
  out.cumulative = Vector::Zero(traces.front().rounds());
  out.scaled_34 = Vector::Zero(traces.front().rounds());
  out.scaled_12 = Vector::Zero(traces.front().rounds());
  for (const RegretTrace& tr : traces) {
    if (tr.rounds() != out.rounds()) {
      throw std::invalid_argument("mean_trace: trace lengths differ");
    }
    out.cumulative += tr.cumulative;
    out.scaled_34 += tr.scaled_34;
    out.scaled_12 += tr.scaled_12;
  }
  const double n = static_cast<double>(traces.size());
  out.cumulative /= n;
  out.scaled_34 /= n;
  out.scaled_12 /= n;
  return out;
}

namespace {

RegretTrace run_kexp(const ProblemConfig& config, Environment& env,
                     uint64_t seed, const RunOptions& options) {
  const double step = options.net_step > 0.0
                          ? options.net_step
                          : finest_step_within(config, options.net_budget);
  // build_net throws when the grid blows past max_net_points; an explicit
  // refusal, never a silent fallback to OGD.
  const ParameterNet net = build_net(config, step, options.max_net_points);

  KexpParams params = kexp_defaults(config);
  params.eta *= options.eta_scale;
  if (options.eta) params.eta = *options.eta;
  if (options.eps) params.eps = *options.eps;

  KexpState state = make_kexp_state(net.size());
  Rng rng(mix_seed(seed, 0xE281));

  Vector increments(config.T);
  for (long t = 1; t <= config.T; ++t) {
    const Vector x = env.context_at(t);
    const KexpStepResult res =
        kexp_step(state, net, x,
                  [&](double y) { return env.loss_at(t, y); }, params, config,
                  rng, options.max_bins);
    increments[t - 1] = res.incurred_loss - env.comparator_loss_at(t);
  }
  return make_trace(increments);
}

RegretTrace run_ogd(const ProblemConfig& config, Environment& env,
                    uint64_t seed, const RunOptions& options) {
  OgdParams params = ogd_defaults(config);
  params.eta *= options.eta_scale;
  params.delta *= options.delta_scale;
  params.alpha = params.delta;
  if (options.eta) params.eta = *options.eta;
  if (options.delta) {
    params.delta = *options.delta;
    params.alpha = *options.delta;
  }
  const double half_span = 0.5 * (config.beta_W - config.alpha_W);
  if (params.alpha >= half_span) params.alpha = 0.5 * half_span;

  OgdState state = make_ogd_state(config.d);
  Rng rng(mix_seed(seed, 0x06D0));

  Vector increments(config.T);
  for (long t = 1; t <= config.T; ++t) {
    const Vector x = env.context_at(t);
    const OgdStepResult res =
        ogd_step(state, x, [&](double y) { return env.loss_at(t, y); }, params,
                 config, rng);
    increments[t - 1] = res.incurred_loss - env.comparator_loss_at(t);
  }
  return make_trace(increments);
}

RegretTrace run_flaxman(const ProblemConfig& config, Environment& env,
                        uint64_t seed, const RunOptions& options) {
  OgdParams params = flaxman_defaults(config);
  params.eta *= options.eta_scale;
  params.delta *= options.delta_scale;
  if (options.eta) params.eta = *options.eta;
  if (options.delta) params.delta = *options.delta;
  if (params.delta >= config.W) params.delta = 0.5 * config.W;

  OgdState state = make_ogd_state(config.d);
  Rng rng(mix_seed(seed, 0xF1A8));

  Vector increments(config.T);
  for (long t = 1; t <= config.T; ++t) {
    const FlaxmanStepResult res = flaxman_step(
        state, [&](const Vector& w) { return env.full_loss_at(t, w); }, params,
        config, rng);
    increments[t - 1] = res.incurred_loss - env.comparator_loss_at(t);
  }
  return make_trace(increments);
}

}  // namespace

RegretTrace run_algorithm(Algorithm algorithm, const ProblemConfig& config,
                          Environment& env, uint64_t seed,
                          const RunOptions& options) {
  config.validate();
  if (env.horizon() < config.T) {
    throw std::invalid_argument("run: environment horizon shorter than T");
  }
  switch (algorithm) {
    case Algorithm::kOptPbco:
      return run(config, env, seed, options);
    case Algorithm::kKexp:
      return run_kexp(config, env, seed, options);
    case Algorithm::kOgd:
      return run_ogd(config, env, seed, options);
    case Algorithm::kFlaxman:
      return run_flaxman(config, env, seed, options);
  }
  throw std::logic_error("run_algorithm: unknown algorithm");
}

RegretTrace run(const ProblemConfig& config, Environment& env, uint64_t seed,
                const RunOptions& options) {
  const RegimeChoice choice = choose_regime(config);
  return run_algorithm(choice.regime == Regime::kKexp ? Algorithm::kKexp
                                                      : Algorithm::kOgd,
                       config, env, seed, options);
}

}  // namespace pbco
