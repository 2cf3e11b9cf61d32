#pragma once

#include "nullrx/ensemble.hpp"

namespace nullrx {

/// Standard normal tail probability Q(x) = P[Z > x].
double q_function(double x);

/// Prior-weighted Gram matrix G(i, j) = sqrt(pi_i pi_j) <psi_i|psi_j>.
/// Hermitian, positive semidefinite, unit trace.
struct GramMatrix {
  Eigen::MatrixXcd entries;
};

/// Gram matrix of `copies` tensor copies of each state (inner products raised
/// to the n-th power). Vectors are normalized first so the trace is exactly
/// the prior sum.
GramMatrix weighted_gram(const PureStateEnsemble& ens, int copies = 1);
/// Built from the closed-form coherent overlaps; matches
/// weighted_gram(coherent_as_pure(ens)) without the factorization round trip.
GramMatrix weighted_gram(const CoherentEnsemble& ens);

/// Principal square root of a Hermitian positive semidefinite matrix.
/// Eigenvalues in [-kPsdTolerance, 0) are clipped to zero; anything lower
/// throws. The eigendecomposition result is refined by Newton steps on the
/// well-conditioned part, so small off-diagonal entries of the root keep
/// their relative accuracy.
Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& A);

/// Square-root measurement error 1 - sum_m |(G^1/2)(m, m)|^2, evaluated as
/// the off-diagonal mass sum_{m != k} |(G^1/2)(m, k)|^2 (equal because
/// tr G = 1) so that tiny error probabilities are not lost to cancellation.
/// Optimal for equiprobable geometrically uniform ensembles (PSK, PPM).
double srm_error(const GramMatrix& gram);
double srm_error(const PureStateEnsemble& ens, int copies = 1);
double srm_error(const CoherentEnsemble& ens);

/// Minimum error for two pure states with priors (p1, p2) and fidelity F:
/// (1 - sqrt(1 - 4 p1 p2 F)) / 2.
double helstrom_binary(double p1, double p2, double fidelity);

/// Optimal error exponent per photon, kappa = min_delta / N.
double helstrom_epe(const CoherentEnsemble& ens);
/// Heterodyne error exponent, kappa / 4.
double heterodyne_epe(const CoherentEnsemble& ens);

/// Union bound for minimum-distance decoding of heterodyne outcomes
/// (noise variance 1/2 per quadrature):
/// sum_m pi_m sum_{m' != m} Q(||alpha_m - alpha_m'|| / sqrt 2).
double heterodyne_union_bound(const CoherentEnsemble& ens);

/// Exact heterodyne error of equiprobable QPSK with quadrant decisions:
/// 1 - (1 - Q(sqrt N))^2.
double heterodyne_qpsk_exact(double N);

/// Direct detection of M-ary PPM: (M - 1)/M * exp(-N).
double direct_detection_ppm_error(int M, double N);

}  // namespace nullrx
