#pragma once

#include "pbco/geometry.hpp"

namespace pbco {

/// Per-round cumulative regret of one run together with its scaled series
/// cumulative[t]/t^{3/4} and cumulative[t]/sqrt(t) (t is 1-based).
struct RegretTrace {
  Vector cumulative;
  Vector scaled_34;
  Vector scaled_12;

  long rounds() const { return cumulative.size(); }
};

// Builds the cumulative and scaled series from per-round regret increments.
RegretTrace make_trace(const Vector& per_round_regret);

// Pointwise mean of equally long traces.
RegretTrace mean_trace(const std::vector<RegretTrace>& traces);

}  // namespace pbco
