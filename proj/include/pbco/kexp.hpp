#pragma once

#include <functional>

#include "pbco/geometry.hpp"
#include "pbco/kernel1d.hpp"

namespace pbco {

/// Probability distribution over the points of a ParameterNet.
struct WeightVector {
  Vector weights;

  int size() const { return static_cast<int>(weights.size()); }
  void validate(double tol = 1e-9) const;
  static WeightVector uniform(int n);
};

/// Learning rate and kernel width of the exponential-weights learner.
struct KexpParams {
  double eta = 0.1;
  double eps = 1e-3;
};

// eps = 1/(3LT); eta = sqrt(2 d log(L'T) / (B C^2 T)) with L' = LDW and
// B = 2 (1 + ln(3LT) + ln(beta_W - alpha_W)). B is floored at 2 and the
// logarithm at ln 2 so degenerate constants stay usable.
KexpParams kexp_defaults(const ProblemConfig& config);

// Bin count resolving the kernel width: max(64, ceil(range / eps)), capped.
int kexp_bin_count(double lo, double hi, double eps, int max_bins = 1 << 20);

// Bin index of every prediction.
Eigen::VectorXi bin_indices(const Vector& predictions,
                            const PredictionRange& range);

// Pushforward of p through w -> <w, x> onto the bin grid.
BinnedDensity marginalize(const WeightVector& p, const ParameterNet& net,
                          const Vector& x, const PredictionRange& range);
BinnedDensity marginalize_binned(const WeightVector& p,
                                 const Eigen::VectorXi& bins,
                                 const PredictionRange& range);

// Uniformly random net point whose prediction falls in the bin of y_t; when
// that bin holds no net point, the nearest occupied bin is used, ties toward
// the lower index. Throws on an empty net.
int select_parameter_index(const Eigen::VectorXi& bins,
                           const PredictionRange& range, double y_t, Rng& rng);
Vector select_parameter(const ParameterNet& net, const Vector& x, double y_t,
                        const PredictionRange& range, Rng& rng);

// Multiplicative exponential-weights update in log space (max-shifted, so
// large estimates cannot underflow the whole weight vector).
void exp_weights_update(Vector& log_weights, const Vector& estimates,
                        double eta);
WeightVector normalize_log_weights(const Vector& log_weights);

/// Mutable state of one exponential-weights learner run.
struct KexpState {
  Vector log_weights;
  WeightVector p;
};

KexpState make_kexp_state(int net_size);

struct KexpStepResult {
  int w_index = -1;
  Vector w;
  double y_t = 0.0;
  double incurred_loss = 0.0;
  BinnedDensity q;    // marginal before the update
  Vector ell_tilde;   // per-bin loss estimate of the round
  Vector f_tilde;     // its lift onto net points
};

using LossOracle = std::function<double(double)>;

// One round: bin the predictions, smooth-sample y_t, play a matching net
// point, query the loss once, build the importance-weighted estimate and
// update p multiplicatively.
KexpStepResult kexp_step(KexpState& state, const ParameterNet& net,
                         const Vector& x_t, const LossOracle& loss_oracle,
                         const KexpParams& params, const ProblemConfig& config,
                         Rng& rng, int max_bins = 1 << 20);

}  // namespace pbco
