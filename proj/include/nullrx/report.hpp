#pragma once

#include <cstdint>
#include <vector>

namespace nullrx {

/// Conditional error probabilities P[E|m] and their prior-weighted mean.
struct ErrorReport {
  std::vector<double> per_hypothesis;
  double average = 0.0;
};

/// Monte Carlo estimate of an error probability.
struct SimEstimate {
  double point = 0.0;
  std::int64_t trials = 0;
  std::int64_t errors = 0;
  /// 1.96 * sqrt(p(1-p)/trials).
  double ci_halfwidth = 0.0;
  std::uint64_t seed = 0;
};

}  // namespace nullrx
