#include "pbco/kexp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pbco {

void WeightVector::validate(double tol) const {
  if (weights.size() == 0 || !weights.allFinite() ||
      weights.minCoeff() < -tol) {
    throw std::invalid_argument("WeightVector: negative or non-finite weight");
  }
  if (std::abs(weights.sum() - 1.0) > tol) {
    throw std::invalid_argument("WeightVector: weights must sum to 1");
  }
}

WeightVector WeightVector::uniform(int n) {
  if (n < 1) throw std::invalid_argument("WeightVector: empty support");
  WeightVector p;
  p.weights = Vector::Constant(n, 1.0 / n);
  return p;
}

KexpParams kexp_defaults(const ProblemConfig& config) {
  config.validate();
  KexpParams kp;
  kp.eps = 1.0 / (3.0 * config.L * static_cast<double>(config.T));
  const double span = config.beta_W - config.alpha_W;
  const double B = std::max(
      2.0, 2.0 * (1.0 + std::log(3.0 * config.L * config.T) + std::log(span)));
  const double lprime = config.L * config.D * config.W;
  const double log_lt =
      std::max(std::log(lprime * static_cast<double>(config.T)), std::log(2.0));
  kp.eta = std::sqrt(2.0 * config.d * log_lt /
                     (B * config.C * config.C * static_cast<double>(config.T)));
  return kp;
}

int kexp_bin_count(double lo, double hi, double eps, int max_bins) {
  const double needed = std::ceil((hi - lo) / eps);
  int m = 64;
  if (needed > m) {
    m = needed > static_cast<double>(max_bins) ? max_bins
                                               : static_cast<int>(needed);
  }
  return m;
}

Eigen::VectorXi bin_indices(const Vector& predictions,
                            const PredictionRange& range) {
  Eigen::VectorXi idx(predictions.size());
  for (int i = 0; i < predictions.size(); ++i) {
    idx[i] = range.bin_index(predictions[i]);
  }
  return idx;
}

BinnedDensity marginalize_binned(const WeightVector& p,
                                 const Eigen::VectorXi& bins,
                                 const PredictionRange& range) {
  p.validate();
  if (bins.size() != p.weights.size()) {
    throw std::invalid_argument("marginalize: bins/weights size mismatch");
  }
  BinnedDensity q;
  q.range = range;
  q.mass = Vector::Zero(range.bins);
  for (int i = 0; i < bins.size(); ++i) q.mass[bins[i]] += p.weights[i];
  return q;
}

BinnedDensity marginalize(const WeightVector& p, const ParameterNet& net,
                          const Vector& x, const PredictionRange& range) {
  if (net.size() != p.size()) {
    throw std::invalid_argument("marginalize: net/weights size mismatch");
  }
  return marginalize_binned(p, bin_indices(net.predictions(x), range), range);
}

int select_parameter_index(const Eigen::VectorXi& bins,
                           const PredictionRange& range, double y_t,
                           Rng& rng) {
  const int n = static_cast<int>(bins.size());
  if (n == 0) throw std::runtime_error("select_parameter: empty net");
  const int target = range.bin_index(y_t);

  // Occupied bin nearest to the target, lower index on ties.
  int best_bin = -1;
  long best_dist = -1;
  for (int i = 0; i < n; ++i) {
    const long dist = std::labs(static_cast<long>(bins[i]) - target);
    if (best_bin < 0 || dist < best_dist ||
        (dist == best_dist && bins[i] < best_bin)) {
      best_bin = bins[i];
      best_dist = dist;
    }
  }

  int count = 0;
  for (int i = 0; i < n; ++i) {
    if (bins[i] == best_bin) ++count;
  }
  std::uniform_int_distribution<int> pick(0, count - 1);
  int want = pick(rng);
  for (int i = 0; i < n; ++i) {
    if (bins[i] == best_bin && want-- == 0) return i;
  }
  throw std::logic_error("select_parameter: selection walk failed");
}

Vector select_parameter(const ParameterNet& net, const Vector& x, double y_t,
                        const PredictionRange& range, Rng& rng) {
  const Eigen::VectorXi bins = bin_indices(net.predictions(x), range);
  return net.point(select_parameter_index(bins, range, y_t, rng));
}

void exp_weights_update(Vector& log_weights, const Vector& estimates,
                        double eta) {
  if (log_weights.size() != estimates.size()) {
    throw std::invalid_argument("exp_weights_update: size mismatch");
  }
  log_weights -= eta * estimates;
  log_weights.array() -= log_weights.maxCoeff();  // recenter, avoids drift
}

WeightVector normalize_log_weights(const Vector& log_weights) {
  WeightVector p;
  p.weights = (log_weights.array() - log_weights.maxCoeff()).exp();
  const double z = p.weights.sum();
  if (!(z > 0.0)) {
    throw std::runtime_error("normalize_log_weights: vanishing weights");
  }
  p.weights /= z;
  return p;
}

KexpState make_kexp_state(int net_size) {
  KexpState s;
  s.log_weights = Vector::Zero(net_size);
  s.p = WeightVector::uniform(net_size);
  return s;
}

KexpStepResult kexp_step(KexpState& state, const ParameterNet& net,
                         const Vector& x_t, const LossOracle& loss_oracle,
                         const KexpParams& params, const ProblemConfig& config,
                         Rng& rng, int max_bins) {
  if (params.eta <= 0.0 || params.eps <= 0.0) {
    throw std::invalid_argument("kexp_step: eta and eps must be positive");
  }
  const Vector preds = net.predictions(x_t);
  PredictionRange probe = prediction_range_of(preds, 1);
  const int bins = kexp_bin_count(probe.lo, probe.hi, params.eps, max_bins);
  const PredictionRange range = prediction_range_of(preds, bins);
  const Eigen::VectorXi pred_bins = bin_indices(preds, range);

  KexpStepResult out;
  out.q = marginalize_binned(state.p, pred_bins, range);
  const KernelParams kp = kernel_params_for(out.q, params.eps);

  out.y_t = sample_smoothed(out.q, params.eps, rng);
  out.w_index = select_parameter_index(pred_bins, range, out.y_t, rng);
  out.w = net.point(out.w_index);

  out.incurred_loss = loss_oracle(preds[out.w_index]);
  if (!std::isfinite(out.incurred_loss) ||
      out.incurred_loss < config.loss_floor - 1e-9 ||
      out.incurred_loss > config.C + 1e-9) {
    throw std::runtime_error(
        "kexp_step: loss oracle broke its declared range");
  }

  const int j_t = range.bin_index(out.y_t);
  const double density =
      smoothed_mass_in_bin(out.q, params.eps, j_t) / range.bin_width();
  if (!(density > 0.0)) {
    throw std::runtime_error("kexp_step: sampled a zero-density bin");
  }

  // Per-bin estimate; nonzero only on the kernel support of y_t.
  out.ell_tilde = Vector::Zero(bins);
  double support_lo, support_hi;
  if (std::abs(out.y_t - kp.y_bar) >= kp.eps) {
    support_lo = std::min(out.y_t, kp.y_bar);
    support_hi = std::max(out.y_t, kp.y_bar);
  } else {
    support_lo = kp.y_bar - kp.eps;
    support_hi = kp.y_bar;
  }
  const int j_from = std::max(0, range.bin_index(support_lo) - 1);
  const int j_to = std::min(bins - 1, range.bin_index(support_hi) + 1);
  for (int j = j_from; j <= j_to; ++j) {
    out.ell_tilde[j] = loss_estimate(out.incurred_loss, out.y_t, density,
                                     range.bin_center(j), kp);
  }

  out.f_tilde.resize(preds.size());
  for (int i = 0; i < preds.size(); ++i) {
    out.f_tilde[i] = out.ell_tilde[pred_bins[i]];
  }

  exp_weights_update(state.log_weights, out.f_tilde, params.eta);
  state.p = normalize_log_weights(state.log_weights);
  return out;
}

}  // namespace pbco
