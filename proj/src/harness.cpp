#include "pbco/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <stdexcept>
#include <thread>

namespace pbco {

void ExperimentConfig::validate() const {
  if (seed_count < 1) {
    throw std::invalid_argument("ExperimentConfig: need at least one seed");
  }
  if (T < 1) throw std::invalid_argument("ExperimentConfig: T must be >= 1");
  if (d < 1) throw std::invalid_argument("ExperimentConfig: d must be >= 1");
}

namespace {

RegretTrace run_one_seed(const ExperimentConfig& cfg, uint64_t seed) {
  auto env = make_environment(cfg.env_kind, cfg.d, cfg.T, seed);
  ProblemConfig config = env->problem_config();
  // The environment may shorten the horizon (equal-interval constructions).
  config.T = std::min<long>(cfg.T, env->horizon());
  RegretTrace trace =
      run_algorithm(cfg.algorithm, config, *env, seed, cfg.options);
  if (env->total_oracle_calls() != config.T) {
    throw std::runtime_error("run_experiment: oracle-call audit failed");
  }
  return trace;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const int n = cfg.seed_count;
  int workers = cfg.threads > 0
                    ? cfg.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min(workers, n);

  ExperimentResult result;
  result.per_seed.resize(n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) {
      result.per_seed[i] = run_one_seed(cfg, cfg.seed_base + i);
    }
  } else {
    std::vector<std::future<RegretTrace>> futures;
    futures.reserve(n);
    for (int i = 0; i < n; ++i) {
      futures.push_back(std::async(std::launch::async, run_one_seed, cfg,
                                   cfg.seed_base + i));
    }
    for (int i = 0; i < n; ++i) result.per_seed[i] = futures[i].get();
  }
  result.mean = mean_trace(result.per_seed);
  if (!cfg.out_path.empty()) emit_csv(result.mean, cfg.out_path);
  return result;
}

std::string trace_to_csv(const RegretTrace& trace) {
  std::string out = "t,cum_regret,scaled_t34,scaled_t12\n";
  char row[160];
  for (long t = 1; t <= trace.rounds(); ++t) {
    std::snprintf(row, sizeof(row), "%ld,%.9f,%.9f,%.9f\n", t,
                  trace.cumulative[t - 1], trace.scaled_34[t - 1],
                  trace.scaled_12[t - 1]);
    out += row;
  }
  return out;
}

void emit_csv(const RegretTrace& trace, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("emit_csv: cannot open " + path);
  f << trace_to_csv(trace);
  if (!f) throw std::runtime_error("emit_csv: write failed for " + path);
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "optpbco") return Algorithm::kOptPbco;
  if (name == "kexp") return Algorithm::kKexp;
  if (name == "ogd") return Algorithm::kOgd;
  if (name == "flaxman") return Algorithm::kFlaxman;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kOptPbco:
      return "optpbco";
    case Algorithm::kKexp:
      return "kexp";
    case Algorithm::kOgd:
      return "ogd";
    case Algorithm::kFlaxman:
      return "flaxman";
  }
  return "?";
}

double loglog_slope_last_half(const Vector& series) {
  const long T = series.size();
  if (T < 4) throw std::invalid_argument("loglog_slope: series too short");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long n = 0;
  for (long t = T / 2; t <= T; ++t) {
    const double v = series[t - 1];
    if (v <= 0.0) continue;  // log undefined; skip (rare, early zeros)
    const double x = std::log(static_cast<double>(t));
    const double y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return 0.0;
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return 0.0;
  return (n * sxy - sx * sy) / denom;
}

}  // namespace pbco
