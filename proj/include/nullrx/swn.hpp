#pragma once

#include <cstdint>

#include "nullrx/ensemble.hpp"
#include "nullrx/report.hpp"
#include "nullrx/sequential.hpp"

namespace nullrx {

// Sequential waveform nulling: the input is split into L equal-amplitude
// slices. Slice l is displaced by -alpha_mu / sqrt(L) and sent to an on/off
// photodetector; a click moves the nulled hypothesis mu to mu + 1. The
// decision is the final mu. Hypotheses are nulled in index order 0..M-1;
// permute the ensemble to null in another order.
//
// Hypothesis m (zero-based) needs m clicks to be declared, so any L < m
// gives P[E|m] = 1.

/// Per-slice click law: advance(mu, m) = 1 - exp(-delta(mu, m) / L).
StepLaw swn_step_law(const CoherentEnsemble& ens, int slices);

/// Exact error via dynamic programming over the nulled hypothesis.
ErrorReport swn_exact_error(const CoherentEnsemble& ens, int slices);

/// Exact error by explicit summation over every increasing vector of click
/// slices. Combinatorial; limited to L <= 20 and M <= 8.
ErrorReport swn_bruteforce_error(const CoherentEnsemble& ens, int slices);

inline constexpr int kBruteforceMaxSlices = 20;
inline constexpr std::size_t kBruteforceMaxHypotheses = 8;

/// sum_m pi_m sum_{K=0}^{m-2} C(L, K) exp(-min_delta (L - K) / L), with
/// one-based m. Not capped at 1.
double swn_upper_bound(const CoherentEnsemble& ens, int slices);

/// max(0, (1 - (M - 2) / L) * kappa): lower bound on the error exponent.
double swn_exponent_bound(const CoherentEnsemble& ens, int slices);

SimEstimate swn_simulate(const CoherentEnsemble& ens, int slices, std::int64_t trials,
                         std::uint64_t seed);

}  // namespace nullrx
