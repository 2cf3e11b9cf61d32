#include "nullrx/sequential.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>

#include "nullrx/error.hpp"
#include "nullrx/parallel.hpp"

namespace nullrx {
namespace {

constexpr std::int64_t kChunkTrials = 1 << 16;

void check_law(const StepLaw& law, std::size_t hypotheses) {
  const auto M = static_cast<Eigen::Index>(hypotheses);
  if (law.stay.rows() != M || law.stay.cols() != M || law.advance.rows() != M ||
      law.advance.cols() != M) {
    throw ValidationError("step law does not match the number of hypotheses");
  }
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<double> hypothesis_distribution(const StepLaw& law, std::size_t true_hypothesis,
                                            int steps) {
  const auto M = static_cast<std::size_t>(law.stay.rows());
  if (true_hypothesis >= M) throw ValidationError("hypothesis index out of range");
  if (steps < 0) throw ValidationError("step count must be nonnegative");
  const auto m = static_cast<Eigen::Index>(true_hypothesis);

  std::vector<double> f(M, 0.0), next(M, 0.0);
  f[0] = 1.0;
  // mu never exceeds the number of steps taken, so only the first
  // min(step, M) entries can be nonzero.
  for (int l = 0; l < steps; ++l) {
    std::fill(next.begin(), next.end(), 0.0);
    const std::size_t reach = std::min<std::size_t>(static_cast<std::size_t>(l) + 1, M);
    for (std::size_t mu = 0; mu < reach; ++mu) {
      if (f[mu] == 0.0) continue;
      const auto i = static_cast<Eigen::Index>(mu);
      next[mu] += f[mu] * law.stay(i, m);
      next[std::min(mu + 1, M - 1)] += f[mu] * law.advance(i, m);
    }
    std::swap(f, next);
  }
  return f;
}

ErrorReport sequential_error(const StepLaw& law, std::span<const double> priors, int steps) {
  check_law(law, priors.size());
  ErrorReport report;
  report.per_hypothesis.resize(priors.size());
  for (std::size_t m = 0; m < priors.size(); ++m) {
    if (m > static_cast<std::size_t>(std::max(steps, 0))) {
      report.per_hypothesis[m] = 1.0;
      continue;
    }
    const auto f = hypothesis_distribution(law, m, steps);
    // Direct sum, not 1 - f[m].
    double err = 0.0;
    for (std::size_t mu = 0; mu < f.size(); ++mu) {
      if (mu != m) err += f[mu];
    }
    report.per_hypothesis[m] = std::min(err, 1.0);
  }
  for (std::size_t m = 0; m < priors.size(); ++m) {
    report.average += priors[m] * report.per_hypothesis[m];
  }
  return report;
}

SimEstimate simulate_sequential(const StepLaw& law, std::span<const double> priors, int steps,
                                std::int64_t trials, std::uint64_t seed) {
  check_law(law, priors.size());
  if (trials < 1) throw ValidationError("trials must be at least 1");
  if (steps < 0) throw ValidationError("step count must be nonnegative");

  const std::size_t M = priors.size();
  std::vector<double> cumulative(M);
  std::partial_sum(priors.begin(), priors.end(), cumulative.begin());

  const auto chunks = static_cast<std::size_t>((trials + kChunkTrials - 1) / kChunkTrials);
  std::vector<std::int64_t> errors(chunks, 0);

  parallel_for(chunks, [&](std::size_t c) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
    std::mt19937_64 rng(seq);
    const std::int64_t begin = static_cast<std::int64_t>(c) * kChunkTrials;
    const std::int64_t end = std::min(trials, begin + kChunkTrials);
    std::int64_t wrong = 0;
    for (std::int64_t t = begin; t < end; ++t) {
      const double u = uniform01(rng) * cumulative.back();
      const auto m = static_cast<Eigen::Index>(std::min<std::size_t>(
          static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                   cumulative.begin()),
          M - 1));
      Eigen::Index mu = 0;
      for (int l = 0; l < steps; ++l) {
        if (uniform01(rng) < law.advance(mu, m) && mu + 1 < static_cast<Eigen::Index>(M)) ++mu;
      }
      if (mu != m) ++wrong;
    }
    errors[c] = wrong;
  });

  SimEstimate est;
  est.trials = trials;
  est.seed = seed;
  for (const auto e : errors) est.errors += e;
  est.point = static_cast<double>(est.errors) / static_cast<double>(trials);
  est.ci_halfwidth = 1.96 * std::sqrt(est.point * (1.0 - est.point) / static_cast<double>(trials));
  return est;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c < 0x1.0p53 ? std::round(c) : c;
}

double click_count_bound(std::span<const double> priors, int steps, double log_x) {
  double total = 0.0;
  for (std::size_t idx = 0; idx < priors.size(); ++idx) {
    const int m = static_cast<int>(idx) + 1;
    double inner = 0.0;
    for (int K = 0; K <= m - 2 && K <= steps; ++K) {
      const int power = steps - K;
      const double term = power == 0 ? 1.0 : std::exp(power * log_x);
      inner += binomial(steps, K) * term;
    }
    total += priors[idx] * inner;
  }
  return total;
}

}  // namespace nullrx
