#pragma once

#include <string>
#include <vector>

#include "pbco/dispatcher.hpp"
#include "pbco/trace.hpp"

namespace pbco {

/// One experiment: an algorithm, an environment family, and a block of
/// consecutive seeds. Seeds run independently (possibly in parallel) and are
/// merged in seed order, so outputs are deterministic.
struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kOptPbco;
  std::string env_kind = "squared";
  int d = 1;
  long T = 1;
  uint64_t seed_base = 1;
  int seed_count = 1;
  RunOptions options;
  std::string out_path;  // empty = no file
  int threads = 0;       // 0 = hardware concurrency

  void validate() const;
};

struct ExperimentResult {
  RegretTrace mean;
  std::vector<RegretTrace> per_seed;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// CSV with header t,cum_regret,scaled_t34,scaled_t12 and one row per round,
// nine decimal places, newline-terminated. Byte-deterministic.
std::string trace_to_csv(const RegretTrace& trace);
void emit_csv(const RegretTrace& trace, const std::string& path);

Algorithm algorithm_from_string(const std::string& name);
std::string to_string(Algorithm algorithm);

// Least-squares slope of log(series) against log(t) over the last half of
// the rounds; the flatness statistic of the scaled-regret curves.
double loglog_slope_last_half(const Vector& series);

}  // namespace pbco
