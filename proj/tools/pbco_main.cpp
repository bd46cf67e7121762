#include <cstdio>
#include <exception>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pbco/harness.hpp"
#include "pbco/verification.hpp"

namespace {

struct RunArgs {
  std::string algo = "optpbco";
  std::string env = "squared";
  int d = 1;
  long T = 1000;
  int seeds = 1;
  uint64_t seed_base = 1;
  double net_step = 0.0;
  int net_budget = 10000;
  long max_bins = 1 << 20;
  double eta = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  double eta_scale = 1.0;
  double delta_scale = 1.0;
  int threads = 0;
  std::string out;
};

void add_run_options(CLI::App* cmd, RunArgs* a, bool with_dim = true) {
  cmd->add_option("--algo", a->algo, "optpbco|kexp|ogd|flaxman");
  cmd->add_option("--env", a->env, "squared|absolute|lower_bound|zero");
  if (with_dim) cmd->add_option("--d", a->d, "parameter dimension");
  cmd->add_option("--T", a->T, "rounds");
  cmd->add_option("--seeds", a->seeds, "number of seeds");
  cmd->add_option("--seed-base", a->seed_base, "first seed");
  cmd->add_option("--net-step", a->net_step, "grid step (0 = auto)");
  cmd->add_option("--net-budget", a->net_budget,
                  "auto-step point budget for the net");
  cmd->add_option("--max-bins", a->max_bins, "cap on prediction bins");
  cmd->add_option("--eta", a->eta, "learning-rate override");
  cmd->add_option("--eps", a->eps, "kernel-width override");
  cmd->add_option("--delta", a->delta, "perturbation override");
  cmd->add_option("--eta-scale", a->eta_scale,
                  "multiplier on the default learning rate");
  cmd->add_option("--delta-scale", a->delta_scale,
                  "multiplier on the default perturbation");
  cmd->add_option("--threads", a->threads, "seed-level workers (0 = auto)");
  cmd->add_option("--out", a->out, "output CSV path");
  cmd->set_config("--config", "", "key = value file; # starts a comment");
}

pbco::ExperimentConfig to_config(const RunArgs& a) {
  pbco::ExperimentConfig cfg;
  cfg.algorithm = pbco::algorithm_from_string(a.algo);
  cfg.env_kind = a.env;
  cfg.d = a.d;
  cfg.T = a.T;
  cfg.seed_base = a.seed_base;
  cfg.seed_count = a.seeds;
  cfg.out_path = a.out;
  cfg.threads = a.threads;
  cfg.options.net_step = a.net_step;
  cfg.options.net_budget = a.net_budget;
  cfg.options.max_bins = static_cast<int>(a.max_bins);
  cfg.options.eta_scale = a.eta_scale;
  cfg.options.delta_scale = a.delta_scale;
  if (a.eta > 0.0) cfg.options.eta = a.eta;
  if (a.eps > 0.0) cfg.options.eps = a.eps;
  if (a.delta > 0.0) cfg.options.delta = a.delta;
  return cfg;
}

std::string suffixed_path(const std::string& path, int d) {
  const std::string tag = "_d" + std::to_string(d);
  const size_t dot = path.find_last_of('.');
  if (dot == std::string::npos || dot == 0) return path + tag;
  return path.substr(0, dot) + tag + path.substr(dot);
}

int cmd_run(const RunArgs& args) {
  const pbco::ExperimentConfig cfg = to_config(args);
  const pbco::ExperimentResult res = pbco::run_experiment(cfg);
  const long T = res.mean.rounds();
  std::printf("%s on %s: d=%d T=%ld seeds=%d\n", args.algo.c_str(),
              args.env.c_str(), args.d, T, args.seeds);
  std::printf("final regret=%.6f  R/T^(3/4)=%.6f  R/sqrt(T)=%.6f\n",
              res.mean.cumulative[T - 1], res.mean.scaled_34[T - 1],
              res.mean.scaled_12[T - 1]);
  if (!cfg.out_path.empty()) {
    std::printf("wrote %s\n", cfg.out_path.c_str());
  }
  return 0;
}

int cmd_sweep(const RunArgs& args, const std::vector<int>& dims) {
  for (int d : dims) {
    RunArgs one = args;
    one.d = d;
    if (!args.out.empty()) one.out = suffixed_path(args.out, d);
    cmd_run(one);
  }
  return 0;
}

int cmd_verify(uint64_t seed) {
  const std::vector<pbco::CheckReport> reports = pbco::run_preflight(seed);
  bool all = true;
  for (const pbco::CheckReport& r : reports) {
    std::printf("CHECK %s %s max_dev=%.3g%s%s\n", r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.max_dev,
                r.detail.empty() ? "" : " ", r.detail.c_str());
    all = all && r.pass;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudo-1d bandit convex optimization harness"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run_cmd = app.add_subcommand("run", "run one experiment");
  add_run_options(run_cmd, &run_args);

  RunArgs sweep_args;
  std::string dim_list = "1";
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "run one experiment per dimension");
  add_run_options(sweep_cmd, &sweep_args, /*with_dim=*/false);
  sweep_cmd->add_option("--d", dim_list, "comma-separated dimensions");

  uint64_t verify_seed = 7;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run the oracle preflight checks");
  verify_cmd->add_option("--seed", verify_seed, "preflight seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(run_args);
    if (sweep_cmd->parsed()) {
      std::vector<int> dims;
      std::stringstream ss(dim_list);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) dims.push_back(std::stoi(tok));
      }
      if (dims.empty()) throw std::invalid_argument("sweep: empty --d-list");
      return cmd_sweep(sweep_args, dims);
    }
    if (verify_cmd->parsed()) return cmd_verify(verify_seed);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
