#include "nullrx/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nullrx/error.hpp"

namespace nullrx {
namespace {

// Newton refinement of the square root only acts on eigenpairs with
// s_i + s_j above this; nearly singular directions keep the plain root.
constexpr double kRefineFloor = 1e-6;
constexpr int kRefineSteps = 2;

GramMatrix checked(Eigen::MatrixXcd G) {
  if ((G - G.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ValidationError("Gram matrix is not Hermitian");
  }
  const double trace = G.trace().real();
  if (std::abs(trace - 1.0) > 1e-12) {
    throw ValidationError("Gram matrix trace is " + std::to_string(trace) + ", expected 1");
  }
  return {std::move(G)};
}

}  // namespace

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

GramMatrix weighted_gram(const PureStateEnsemble& ens, int copies) {
  if (copies < 1) throw ValidationError("copy count n must be at least 1");
  const auto M = static_cast<Eigen::Index>(ens.size());
  Eigen::MatrixXcd G(M, M);
  for (Eigen::Index i = 0; i < M; ++i) {
    G(i, i) = ens.prior(i);
    for (Eigen::Index j = i + 1; j < M; ++j) {
      const auto& a = ens.vector(i);
      const auto& b = ens.vector(j);
      const std::complex<double> overlap = a.dot(b) / (a.norm() * b.norm());
      G(i, j) = std::sqrt(ens.prior(i) * ens.prior(j)) * std::pow(overlap, copies);
      G(j, i) = std::conj(G(i, j));
    }
  }
  return checked(std::move(G));
}

GramMatrix weighted_gram(const CoherentEnsemble& ens) {
  Eigen::MatrixXcd G = coherent_overlap_matrix(ens);
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    for (Eigen::Index j = 0; j < G.cols(); ++j) {
      G(i, j) *= std::sqrt(ens.prior(i) * ens.prior(j));
    }
  }
  for (Eigen::Index i = 0; i < G.rows(); ++i) G(i, i) = ens.prior(i);
  return checked(std::move(G));
}

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(A);
  if (eig.info() != Eigen::Success) throw ValidationError("psd_sqrt: eigensolver failed");
  const Eigen::MatrixXcd& V = eig.eigenvectors();
  Eigen::VectorXd s = eig.eigenvalues();
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) < -kPsdTolerance) {
      throw ValidationError("psd_sqrt: eigenvalue " + std::to_string(s(k)) +
                            " below tolerance, matrix is not positive semidefinite");
    }
    s(k) = std::sqrt(std::max(s(k), 0.0));
  }
  Eigen::MatrixXcd S = V * s.asDiagonal() * V.adjoint();

  // Solve S X + X S = A - S^2 in the eigenbasis and add X.
  for (int step = 0; step < kRefineSteps; ++step) {
    const Eigen::MatrixXcd R = V.adjoint() * (A - S * S) * V;
    Eigen::MatrixXcd X(R.rows(), R.cols());
    for (Eigen::Index i = 0; i < R.rows(); ++i) {
      for (Eigen::Index j = 0; j < R.cols(); ++j) {
        const double denom = s(i) + s(j);
        X(i, j) = denom > kRefineFloor ? R(i, j) / denom : 0.0;
      }
    }
    S += V * X * V.adjoint();
    S = 0.5 * (S + S.adjoint()).eval();
  }
  return S;
}

double srm_error(const GramMatrix& gram) {
  const Eigen::MatrixXcd S = psd_sqrt(gram.entries);
  double err = 0.0;
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    for (Eigen::Index j = 0; j < S.cols(); ++j) {
      if (i != j) err += std::norm(S(i, j));
    }
  }
  return std::clamp(err, 0.0, 1.0);
}

double srm_error(const PureStateEnsemble& ens, int copies) {
  return srm_error(weighted_gram(ens, copies));
}

double srm_error(const CoherentEnsemble& ens) { return srm_error(weighted_gram(ens)); }

double helstrom_binary(double p1, double p2, double fidelity) {
  if (!(p1 >= 0.0) || !(p2 >= 0.0) || std::abs(p1 + p2 - 1.0) > kPriorSumTolerance) {
    throw ValidationError("helstrom_binary: priors must be nonnegative and sum to 1");
  }
  if (!(fidelity >= 0.0) || !(fidelity <= 1.0)) {
    throw ValidationError("helstrom_binary: fidelity must lie in [0, 1]");
  }
  const double x = 4.0 * p1 * p2 * fidelity;
  // (1 - sqrt(1 - x)) / 2 rewritten without cancellation.
  return 0.5 * x / (1.0 + std::sqrt(std::max(0.0, 1.0 - x)));
}

double helstrom_epe(const CoherentEnsemble& ens) { return geometry(ens).kappa; }

double heterodyne_epe(const CoherentEnsemble& ens) { return geometry(ens).kappa / 4.0; }

double heterodyne_union_bound(const CoherentEnsemble& ens) {
  double total = 0.0;
  for (std::size_t m = 0; m < ens.size(); ++m) {
    double row = 0.0;
    for (std::size_t mp = 0; mp < ens.size(); ++mp) {
      if (mp == m) continue;
      row += q_function((ens.state(m) - ens.state(mp)).norm() / std::numbers::sqrt2);
    }
    total += ens.prior(m) * row;
  }
  return total;
}

double heterodyne_qpsk_exact(double N) {
  if (!(N >= 0.0)) throw ValidationError("heterodyne_qpsk_exact: N must be nonnegative");
  const double q = q_function(std::sqrt(N));
  // 1 - (1 - q)^2
  return q * (2.0 - q);
}

double direct_detection_ppm_error(int M, double N) {
  if (M < 2) throw ValidationError("direct_detection_ppm_error: M must be at least 2");
  if (!(N >= 0.0)) throw ValidationError("direct_detection_ppm_error: N must be nonnegative");
  return (M - 1.0) / M * std::exp(-N);
}

}  // namespace nullrx
