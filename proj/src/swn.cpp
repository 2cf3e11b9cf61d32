#include "nullrx/swn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nullrx/error.hpp"

namespace nullrx {
namespace {

void check_slices(int slices) {
  if (slices < 1) throw ValidationError("slice count L must be at least 1");
}

Eigen::MatrixXd difference_energies(const CoherentEnsemble& ens) {
  const auto M = static_cast<Eigen::Index>(ens.size());
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(M, M);
  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index j = i + 1; j < M; ++j) {
      delta(i, j) = delta(j, i) = (ens.state(i) - ens.state(j)).squaredNorm();
    }
  }
  return delta;
}

// Probability of `count` clicks at the slices listed in `clicks` (strictly
// increasing, one-based) and none elsewhere, with hypothesis m true.
double click_pattern_probability(const Eigen::MatrixXd& delta, const std::vector<int>& clicks,
                                 Eigen::Index m, int slices) {
  const double L = slices;
  double p = 1.0;
  int previous = 0;
  for (std::size_t k = 0; k < clicks.size(); ++k) {
    const double d = delta(static_cast<Eigen::Index>(k), m);
    const int gap = clicks[k] - previous - 1;
    p *= std::exp(-d * gap / L) * (1.0 - std::exp(-d / L));
    previous = clicks[k];
  }
  const double d_last = delta(static_cast<Eigen::Index>(clicks.size()), m);
  p *= std::exp(-d_last * (slices - previous) / L);
  return p;
}

}  // namespace

StepLaw swn_step_law(const CoherentEnsemble& ens, int slices) {
  check_slices(slices);
  const Eigen::MatrixXd delta = difference_energies(ens);
  const double L = slices;
  StepLaw law;
  law.stay = (-delta / L).array().exp().matrix();
  law.advance = (-delta / L).unaryExpr([](double x) { return -std::expm1(x); });
  return law;
}

ErrorReport swn_exact_error(const CoherentEnsemble& ens, int slices) {
  return sequential_error(swn_step_law(ens, slices), ens.priors(), slices);
}

ErrorReport swn_bruteforce_error(const CoherentEnsemble& ens, int slices) {
  check_slices(slices);
  if (slices > kBruteforceMaxSlices || ens.size() > kBruteforceMaxHypotheses) {
    throw ValidationError("swn_bruteforce_error: limited to L <= 20 and M <= 8");
  }
  const Eigen::MatrixXd delta = difference_energies(ens);

  ErrorReport report;
  report.per_hypothesis.assign(ens.size(), 0.0);
  for (std::size_t m = 0; m < ens.size(); ++m) {
    // An error means fewer than m clicks (m zero-based): K = 0 .. m-1.
    double err = 0.0;
    for (int K = 0; K < static_cast<int>(m) && K <= slices; ++K) {
      // Enumerate increasing K-subsets of {1..L} in lexicographic order.
      std::vector<int> clicks(static_cast<std::size_t>(K));
      for (int k = 0; k < K; ++k) clicks[static_cast<std::size_t>(k)] = k + 1;
      for (;;) {
        err += click_pattern_probability(delta, clicks, static_cast<Eigen::Index>(m), slices);
        int k = K - 1;
        while (k >= 0 && clicks[static_cast<std::size_t>(k)] == slices - (K - 1 - k)) --k;
        if (k < 0) break;
        ++clicks[static_cast<std::size_t>(k)];
        for (int j = k + 1; j < K; ++j) {
          clicks[static_cast<std::size_t>(j)] = clicks[static_cast<std::size_t>(j - 1)] + 1;
        }
      }
    }
    report.per_hypothesis[m] = err;
    report.average += ens.prior(m) * err;
  }
  return report;
}

double swn_upper_bound(const CoherentEnsemble& ens, int slices) {
  check_slices(slices);
  const Eigen::MatrixXd delta = difference_energies(ens);
  double min_delta = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < delta.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < delta.cols(); ++j) min_delta = std::min(min_delta, delta(i, j));
  }
  return click_count_bound(ens.priors(), slices, -min_delta / slices);
}

double swn_exponent_bound(const CoherentEnsemble& ens, int slices) {
  check_slices(slices);
  const double M = static_cast<double>(ens.size());
  return std::max(0.0, (1.0 - (M - 2.0) / slices) * geometry(ens).kappa);
}

SimEstimate swn_simulate(const CoherentEnsemble& ens, int slices, std::int64_t trials,
                         std::uint64_t seed) {
  return simulate_sequential(swn_step_law(ens, slices), ens.priors(), slices, trials, seed);
}

}  // namespace nullrx
