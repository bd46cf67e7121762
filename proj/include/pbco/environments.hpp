#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pbco/geometry.hpp"

namespace pbco {

/// Bandit loss generator. Rounds are 1-based. `loss_at` and `full_loss_at`
/// are the two faces of the same oracle (prediction space vs parameter
/// space); both draw the round's noise from a counter-based seed so the two
/// paths agree exactly, and both count against the round's single-call
/// budget.
class Environment {
 public:
  explicit Environment(bool strict_single_call = true)
      : strict_(strict_single_call) {}
  virtual ~Environment() = default;

  virtual long horizon() const = 0;
  virtual int dim() const = 0;
  virtual Vector context_at(long t) const = 0;

  // Bandit feedback at a scalar prediction. Throws on a second call in the
  // same round when strict.
  double loss_at(long t, double prediction);

  // Bandit feedback at a parameter point (for learners that perturb in
  // parameter space).
  double full_loss_at(long t, const Vector& w);

  // Loss of the fixed comparator at round t, sharing the round's noise.
  virtual double comparator_loss_at(long t) const = 0;

  // Noise-stripped mean loss; the brute-force comparator audit uses this.
  virtual double expected_loss_at(long t, const Vector& w) const = 0;

  // Constants the environment promises (d, T, W, D, C, L, loss bounds).
  virtual ProblemConfig problem_config() const = 0;

  long total_oracle_calls() const { return total_calls_; }
  void reset_call_audit();

 protected:
  virtual double loss_impl(long t, double prediction) const = 0;
  virtual double full_loss_impl(long t, const Vector& w) const = 0;

 private:
  void note_call(long t);

  bool strict_;
  std::vector<uint8_t> called_;
  long total_calls_ = 0;
};

/// Adversarial instance with sign pattern sigma, equal-length context
/// intervals, linear per-interval losses and Gaussian noise (sd 1/4,
/// truncated at +-1 so declared bounds are honest). The additive shift
/// mu/sqrt(d) + 1/2 centers expected losses; without it they are signed.
class LowerBoundEnvironment : public Environment {
 public:
  LowerBoundEnvironment(int d, long T, uint64_t seed, bool shift = true,
                        bool strict_single_call = true);

  long horizon() const override { return T_eff_; }
  int dim() const override { return d_; }
  Vector context_at(long t) const override;
  double comparator_loss_at(long t) const override;
  double expected_loss_at(long t, const Vector& w) const override;
  ProblemConfig problem_config() const override;

  double mu() const { return mu_; }
  double shift() const { return shift_; }
  const Vector& sigma() const { return sigma_; }
  Vector comparator() const;  // -sigma / sqrt(d_eff), zero-padded
  int effective_dim() const { return d_eff_; }
  const std::string& note() const { return note_; }

 protected:
  double loss_impl(long t, double prediction) const override;
  double full_loss_impl(long t, const Vector& w) const override;

 private:
  int interval_of(long t) const;
  double noise_at(long t) const;

  int d_;
  int d_eff_;
  long T_eff_;
  long rounds_per_interval_;
  uint64_t seed_;
  double mu_;
  double shift_;
  Vector sigma_;
  std::string note_;
};

enum class SyntheticKind { kSquared, kAbsolute };

/// Noiseless regression losses (y - <w*, x_t>)^2 or |y - <w*, x_t>| with a
/// fixed w* and contexts drawn uniformly in the unit ball. The comparator w*
/// attains zero loss every round.
class SyntheticEnvironment : public Environment {
 public:
  SyntheticEnvironment(SyntheticKind kind, int d, long T, uint64_t seed,
                       bool strict_single_call = true);

  long horizon() const override { return T_; }
  int dim() const override { return d_; }
  Vector context_at(long t) const override;
  double comparator_loss_at(long) const override { return 0.0; }
  double expected_loss_at(long t, const Vector& w) const override;
  ProblemConfig problem_config() const override;

  const Vector& w_star() const { return w_star_; }

 protected:
  double loss_impl(long t, double prediction) const override;
  double full_loss_impl(long t, const Vector& w) const override;

 private:
  double target_at(long t) const;

  SyntheticKind kind_;
  int d_;
  long T_;
  uint64_t seed_;
  Vector w_star_;
};

/// Identically-zero losses; regret traces vanish by construction.
class ZeroEnvironment : public Environment {
 public:
  ZeroEnvironment(int d, long T, bool strict_single_call = true);

  long horizon() const override { return T_; }
  int dim() const override { return d_; }
  Vector context_at(long t) const override;
  double comparator_loss_at(long) const override { return 0.0; }
  double expected_loss_at(long, const Vector&) const override { return 0.0; }
  ProblemConfig problem_config() const override;

 protected:
  double loss_impl(long, double) const override { return 0.0; }
  double full_loss_impl(long, const Vector&) const override { return 0.0; }

 private:
  int d_;
  long T_;
};

// Kinds: "squared", "absolute", "lower_bound", "zero".
std::unique_ptr<Environment> make_environment(const std::string& kind, int d,
                                              long T, uint64_t seed,
                                              bool strict_single_call = true);

// Brute-force argmin of the cumulative expected loss over a finite candidate
// set. Throws on an empty set.
Vector comparator_check(const Environment& env,
                        const std::vector<Vector>& candidates);

// Counter-derived stream seed; environments use it for per-round noise.
uint64_t mix_seed(uint64_t seed, uint64_t counter);

}  // namespace pbco
