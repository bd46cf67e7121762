#include "pbco/environments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pbco/ogd.hpp"

namespace pbco {

uint64_t mix_seed(uint64_t seed, uint64_t counter) {
  // splitmix64 finalizer over the combined state
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void Environment::note_call(long t) {
  if (t < 1) throw std::invalid_argument("Environment: rounds are 1-based");
  if (static_cast<long>(called_.size()) <= t) called_.resize(t + 1, 0);
  if (strict_ && called_[t]) {
    throw std::runtime_error(
        "Environment: bandit oracle called twice in round " +
        std::to_string(t));
  }
  called_[t] = 1;
  ++total_calls_;
}

void Environment::reset_call_audit() {
  called_.clear();
  total_calls_ = 0;
}

double Environment::loss_at(long t, double prediction) {
  note_call(t);
  return loss_impl(t, prediction);
}

double Environment::full_loss_at(long t, const Vector& w) {
  note_call(t);
  return full_loss_impl(t, w);
}

// ---------------------------------------------------------------------------
// Lower-bound instance

LowerBoundEnvironment::LowerBoundEnvironment(int d, long T, uint64_t seed,
                                             bool shift,
                                             bool strict_single_call)
    : Environment(strict_single_call), d_(d), seed_(seed) {
  if (d < 1) throw std::invalid_argument("LowerBoundEnvironment: d >= 1");
  if (d > T) {
    throw std::invalid_argument(
        "LowerBoundEnvironment: d > T leaves no interval structure");
  }
  long cap = static_cast<long>(std::floor(16.0 * std::sqrt(double(T))));
  cap = std::clamp<long>(cap, 1, T);  // at least one round per interval
  d_eff_ = static_cast<int>(std::min<long>(d, cap));
  rounds_per_interval_ = T / d_eff_;
  T_eff_ = rounds_per_interval_ * d_eff_;
  if (d_eff_ < d) {
    note_ = "construction restricted to the first " + std::to_string(d_eff_) +
            " coordinates";
  } else if (T_eff_ < T) {
    note_ = "horizon truncated to " + std::to_string(T_eff_) +
            " for equal intervals";
  }

  mu_ = std::min(1.0, d_eff_ / (16.0 * std::sqrt(double(T_eff_))));
  shift_ = shift ? mu_ / std::sqrt(double(d_eff_)) + 0.5 : 0.0;

  Rng rng(mix_seed(seed, 0x5161));
  std::uniform_int_distribution<int> coin(0, 1);
  sigma_ = Vector(d_eff_);
  for (int i = 0; i < d_eff_; ++i) sigma_[i] = coin(rng) == 0 ? -1.0 : 1.0;
}

int LowerBoundEnvironment::interval_of(long t) const {
  if (t < 1 || t > T_eff_) {
    throw std::invalid_argument("LowerBoundEnvironment: round out of range");
  }
  const long i = (t - 1) / rounds_per_interval_;
  return static_cast<int>(std::min<long>(i, d_eff_ - 1));
}

double LowerBoundEnvironment::noise_at(long t) const {
  Rng rng(mix_seed(seed_, static_cast<uint64_t>(t)));
  std::normal_distribution<double> gauss(0.0, 0.25);
  return std::clamp(gauss(rng), -1.0, 1.0);
}

Vector LowerBoundEnvironment::context_at(long t) const {
  Vector e = Vector::Zero(d_);
  e[interval_of(t)] = 1.0;
  return e;
}

double LowerBoundEnvironment::loss_impl(long t, double prediction) const {
  return mu_ * sigma_[interval_of(t)] * prediction + shift_ + noise_at(t);
}

double LowerBoundEnvironment::full_loss_impl(long t, const Vector& w) const {
  return loss_impl(t, w.dot(context_at(t)));
}

Vector LowerBoundEnvironment::comparator() const {
  Vector w = Vector::Zero(d_);
  for (int i = 0; i < d_eff_; ++i) {
    w[i] = -sigma_[i] / std::sqrt(double(d_eff_));
  }
  return w;
}

double LowerBoundEnvironment::comparator_loss_at(long t) const {
  const int i = interval_of(t);
  return mu_ * sigma_[i] * (-sigma_[i] / std::sqrt(double(d_eff_))) + shift_ +
         noise_at(t);
}

double LowerBoundEnvironment::expected_loss_at(long t, const Vector& w) const {
  const int i = interval_of(t);
  return mu_ * sigma_[i] * w[i] + shift_;
}

ProblemConfig LowerBoundEnvironment::problem_config() const {
  ProblemConfig cfg = ProblemConfig::linear_link(d_, T_eff_, 1.0, 1.0,
                                                 shift_ + mu_ + 1.0, mu_);
  cfg.loss_floor = shift_ - mu_ - 1.0;
  return cfg;
}

// ---------------------------------------------------------------------------
// Synthetic regression losses

SyntheticEnvironment::SyntheticEnvironment(SyntheticKind kind, int d, long T,
                                           uint64_t seed,
                                           bool strict_single_call)
    : Environment(strict_single_call), kind_(kind), d_(d), T_(T), seed_(seed) {
  if (d < 1 || T < 1) {
    throw std::invalid_argument("SyntheticEnvironment: d, T >= 1");
  }
  Rng rng(mix_seed(seed, 0x77CA));
  w_star_ = sample_in_ball(d, 1.0, rng);
}

Vector SyntheticEnvironment::context_at(long t) const {
  if (t < 1 || t > T_) {
    throw std::invalid_argument("SyntheticEnvironment: round out of range");
  }
  Rng rng(mix_seed(seed_, static_cast<uint64_t>(t)));
  return sample_in_ball(d_, 1.0, rng);
}

double SyntheticEnvironment::target_at(long t) const {
  return w_star_.dot(context_at(t));
}

double SyntheticEnvironment::loss_impl(long t, double prediction) const {
  const double r = prediction - target_at(t);
  return kind_ == SyntheticKind::kSquared ? r * r : std::abs(r);
}

double SyntheticEnvironment::full_loss_impl(long t, const Vector& w) const {
  return loss_impl(t, w.dot(context_at(t)));
}

double SyntheticEnvironment::expected_loss_at(long t, const Vector& w) const {
  const double r = w.dot(context_at(t)) - target_at(t);
  return kind_ == SyntheticKind::kSquared ? r * r : std::abs(r);
}

ProblemConfig SyntheticEnvironment::problem_config() const {
  // Reachable predictions and targets both live in [-1, 1].
  const bool sq = kind_ == SyntheticKind::kSquared;
  return ProblemConfig::linear_link(d_, T_, 1.0, 1.0, sq ? 4.0 : 2.0,
                                    sq ? 4.0 : 1.0);
}

// ---------------------------------------------------------------------------

ZeroEnvironment::ZeroEnvironment(int d, long T, bool strict_single_call)
    : Environment(strict_single_call), d_(d), T_(T) {
  if (d < 1 || T < 1) throw std::invalid_argument("ZeroEnvironment: d, T >= 1");
}

Vector ZeroEnvironment::context_at(long t) const {
  if (t < 1 || t > T_) {
    throw std::invalid_argument("ZeroEnvironment: round out of range");
  }
  Vector e = Vector::Zero(d_);
  e[static_cast<int>((t - 1) % d_)] = 1.0;
  return e;
}

ProblemConfig ZeroEnvironment::problem_config() const {
  return ProblemConfig::linear_link(d_, T_, 1.0, 1.0, 1.0, 1.0);
}

std::unique_ptr<Environment> make_environment(const std::string& kind, int d,
                                              long T, uint64_t seed,
                                              bool strict_single_call) {
  if (kind == "squared") {
    return std::make_unique<SyntheticEnvironment>(SyntheticKind::kSquared, d,
                                                  T, seed, strict_single_call);
  }
  if (kind == "absolute") {
    return std::make_unique<SyntheticEnvironment>(SyntheticKind::kAbsolute, d,
                                                  T, seed, strict_single_call);
  }
  if (kind == "lower_bound") {
    return std::make_unique<LowerBoundEnvironment>(d, T, seed, true,
                                                   strict_single_call);
  }
  if (kind == "zero") {
    return std::make_unique<ZeroEnvironment>(d, T, strict_single_call);
  }
  throw std::invalid_argument("make_environment: unknown kind '" + kind + "'");
}

Vector comparator_check(const Environment& env,
                        const std::vector<Vector>& candidates) {
  if (candidates.empty()) {
    throw std::invalid_argument("comparator_check: empty candidate set");
  }
  double best = 0.0;
  int best_i = -1;
  for (int i = 0; i < static_cast<int>(candidates.size()); ++i) {
    double total = 0.0;
    for (long t = 1; t <= env.horizon(); ++t) {
      total += env.expected_loss_at(t, candidates[i]);
    }
    if (best_i < 0 || total < best) {
      best = total;
      best_i = i;
    }
  }
  return candidates[best_i];
}

}  // namespace pbco
