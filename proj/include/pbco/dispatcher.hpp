#pragma once

#include <cstdint>
#include <optional>

#include "pbco/environments.hpp"
#include "pbco/geometry.hpp"
#include "pbco/trace.hpp"

namespace pbco {

enum class Regime { kKexp, kOgd };
enum class Algorithm { kOptPbco, kKexp, kOgd, kFlaxman };

struct RegimeChoice {
  Regime regime = Regime::kOgd;
  double threshold = 0.0;
  bool log_floored = false;  // set when L'T <= 1 forced the OGD fallback
};

// The inclusive decision rule: exponential weights iff d <= threshold.
RegimeChoice regime_for_threshold(int d, double threshold);

// threshold = W L D sqrt(T) / (C ln(L'T)) with L' = LDW. When L'T <= 1 the
// logarithm has no positive value and the choice falls back to OGD with
// log_floored set.
RegimeChoice choose_regime(const ProblemConfig& config);

/// Knobs of a single run. Scales multiply the paper-formula defaults and are
/// recorded by the harness; hard overrides win over both.
struct RunOptions {
  double net_step = 0.0;  // 0 = finest step within net_budget
  int net_budget = 10000;
  int max_net_points = kDefaultMaxNetPoints;
  int max_bins = 1 << 20;
  double eta_scale = 1.0;
  double delta_scale = 1.0;
  std::optional<double> eta;
  std::optional<double> eps;
  std::optional<double> delta;
};

// Runs one learner for config.T rounds against the environment and returns
// its regret trace (comparator from the environment). The learner's own
// randomness comes from `seed`.
RegretTrace run_algorithm(Algorithm algorithm, const ProblemConfig& config,
                          Environment& env, uint64_t seed,
                          const RunOptions& options = {});

// The regime dispatcher: picks exponential weights or OGD from the problem
// constants, then runs the full horizon.
RegretTrace run(const ProblemConfig& config, Environment& env, uint64_t seed,
                const RunOptions& options = {});

}  // namespace pbco
