#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nullrx/report.hpp"

namespace nullrx {

/// Per-step transition law shared by the nulling and testing receivers.
///
/// The receiver holds a current hypothesis mu (starting at 0). On each step,
/// with the true hypothesis m, it advances mu -> mu + 1 with probability
/// advance(mu, m) and otherwise keeps mu. The decision after the last step
/// is mu. stay(mu, m) = 1 - advance(mu, m); both are stored so that callers
/// can supply each without cancellation. advance(m, m) must be 0.
struct StepLaw {
  Eigen::MatrixXd stay;
  Eigen::MatrixXd advance;
};

/// Distribution of mu after `steps` steps given true hypothesis m.
/// mu is clamped at M - 1.
std::vector<double> hypothesis_distribution(const StepLaw& law, std::size_t true_hypothesis,
                                            int steps);

/// P[E|m] = sum over mu != m of the final distribution, and its average.
ErrorReport sequential_error(const StepLaw& law, std::span<const double> priors, int steps);

/// Monte Carlo run of the receiver. Trials are split into fixed-size chunks,
/// each with its own generator seeded from (seed, chunk index), so the
/// estimate depends only on (seed, trials) and not on the thread count.
SimEstimate simulate_sequential(const StepLaw& law, std::span<const double> priors, int steps,
                                std::int64_t trials, std::uint64_t seed);

/// sum_m pi_m sum_{K=0}^{m-2} C(steps, K) x^(steps-K), hypotheses one-based.
/// `log_x` is ln x (may be -infinity for x = 0).
double click_count_bound(std::span<const double> priors, int steps, double log_x);

/// Binomial coefficient as a double; zero for k > n.
double binomial(int n, int k);

}  // namespace nullrx
