#pragma once

#include <Eigen/Core>

#include <random>
#include <string>

namespace pbco {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Problem constants shared by every learner. The parameter set is the
/// Euclidean ball of radius `W` (radius convention throughout, see README),
/// and predictions live in the interval [alpha_W, beta_W].
struct ProblemConfig {
  int d = 1;        // parameter dimension
  long T = 1;       // horizon in rounds
  double W = 1.0;   // radius of the parameter ball
  double D = 1.0;   // bound on the gradient norm of the link w -> <w, x>
  double C = 1.0;   // losses take values in [loss_floor, C]
  double L = 1.0;   // Lipschitz constant of the scalar loss
  double alpha_W = -1.0;  // lower end of the prediction space
  double beta_W = 1.0;    // upper end of the prediction space

  // Lower bound on admissible loss values. Zero for the standard [0, C]
  // contract; signed environments declare a negative floor.
  double loss_floor = 0.0;

  // Throws std::invalid_argument when a constant is out of range.
  void validate() const;

  // Config for the linear link on the radius-W ball with contexts of norm
  // <= D, so predictions span [-D*W, D*W].
  static ProblemConfig linear_link(int d, long T, double W, double D, double C,
                                   double L);
};

inline constexpr int kDefaultMaxNetPoints = 1 << 20;

/// Finite axis-aligned grid discretization of the parameter ball. Points are
/// stored as columns of a d x N matrix, in lexicographic coordinate order.
/// Immutable after construction.
class ParameterNet {
 public:
  ParameterNet() = default;
  ParameterNet(Matrix points, double step);

  int size() const { return static_cast<int>(points_.cols()); }
  int dim() const { return static_cast<int>(points_.rows()); }
  double step() const { return step_; }
  const Matrix& points() const { return points_; }
  Vector point(int i) const { return points_.col(i); }

  // Predictions <w_i, x> of all net points under a context.
  Vector predictions(const Vector& x) const {
    return points_.transpose() * x;
  }

 private:
  Matrix points_;  // d rows, one column per point
  double step_ = 0.0;
};

/// Scalar prediction interval for the current context, split into `bins`
/// equal-width cells. Edge values belong to the lower bin; `hi` maps to the
/// last bin, and out-of-range values clamp to the nearest bin.
struct PredictionRange {
  double lo = 0.0;
  double hi = 0.0;
  int bins = 1;

  double bin_width() const { return (hi - lo) / bins; }
  double bin_center(int k) const { return lo + (k + 0.5) * bin_width(); }
  double bin_left(int k) const { return lo + k * bin_width(); }
  double bin_right(int k) const { return lo + (k + 1) * bin_width(); }
  int bin_index(double y) const;
};

// Nearest-point projection onto the ball of radius R. Throws on non-finite
// input coordinates.
Vector project_ball(const Vector& w, double R);

// All points of the grid {-W, -W+step, ...}^d that lie inside the ball of
// radius W, in lexicographic order. Throws when more than `max_points` grid
// points fall inside the ball.
ParameterNet build_net(const ProblemConfig& config, double step,
                       int max_points = kDefaultMaxNetPoints);

// Largest step of the form 2W/k (k >= 2) whose net has at most `budget`
// points. Throws when even k = 2 exceeds the budget.
double finest_step_within(const ProblemConfig& config, int budget,
                          int max_subdivisions = 1 << 16);

// Range of <w, x> over the net. A degenerate range is widened by 1e-9 so the
// bin width stays positive. Throws on an empty net.
PredictionRange prediction_range(const ParameterNet& net, const Vector& x,
                                 int bins);
PredictionRange prediction_range_of(const Vector& predictions, int bins);

// Projection onto {w : ||w|| <= W, <w, x> in [alpha_W + alpha, beta_W - alpha]}
// by alternating projections between the ball and the slab. Returns w
// unchanged when it is already feasible; throws when the intersection is
// empty.
Vector project_W_alpha(const Vector& w, const Vector& x,
                       const ProblemConfig& config, double alpha);

}  // namespace pbco
