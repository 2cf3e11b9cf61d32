#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace nullrx {

/// Mode coefficients of one multimode coherent state, in units of sqrt(photons).
using Amplitudes = Eigen::VectorXcd;

/// Tolerance on the sum of priors.
inline constexpr double kPriorSumTolerance = 1e-12;
/// Tolerance on the norm of a pure-state vector.
inline constexpr double kUnitNormTolerance = 1e-10;
/// Eigenvalues of a Gram matrix in [-kPsdTolerance, 0) are treated as zero.
inline constexpr double kPsdTolerance = 1e-10;

/// M >= 2 coherent states on S >= 1 modes with prior probabilities.
/// Hypothesis indices are zero-based throughout the library.
class CoherentEnsemble {
 public:
  /// Validates and takes ownership; throws ValidationError on bad input.
  CoherentEnsemble(std::vector<Amplitudes> states, std::vector<double> priors);

  std::size_t size() const { return states_.size(); }
  std::size_t modes() const { return static_cast<std::size_t>(states_.front().size()); }
  const Amplitudes& state(std::size_t m) const { return states_.at(m); }
  std::span<const Amplitudes> states() const { return states_; }
  double prior(std::size_t m) const { return priors_.at(m); }
  std::span<const double> priors() const { return priors_; }

 private:
  std::vector<Amplitudes> states_;
  std::vector<double> priors_;
};

/// M >= 2 unit vectors in C^d with prior probabilities.
class PureStateEnsemble {
 public:
  PureStateEnsemble(std::vector<Eigen::VectorXcd> vectors, std::vector<double> priors);

  std::size_t size() const { return vectors_.size(); }
  std::size_t dimension() const { return static_cast<std::size_t>(vectors_.front().size()); }
  const Eigen::VectorXcd& vector(std::size_t m) const { return vectors_.at(m); }
  std::span<const Eigen::VectorXcd> vectors() const { return vectors_; }
  double prior(std::size_t m) const { return priors_.at(m); }
  std::span<const double> priors() const { return priors_; }

 private:
  std::vector<Eigen::VectorXcd> vectors_;
  std::vector<double> priors_;
};

using AnyEnsemble = std::variant<CoherentEnsemble, PureStateEnsemble>;

/// Geometric quantities of a coherent ensemble, all in photons except kappa.
struct EnsembleGeometry {
  /// delta(m, m') = ||alpha_m - alpha_m'||^2.
  Eigen::MatrixXd delta;
  double min_delta = 0.0;
  /// sum_m pi_m ||alpha_m||^2
  double avg_energy = 0.0;
  /// min_delta / avg_energy; invariant under common amplitude scaling.
  double kappa = 0.0;

  /// Some pair of states coincides, so every exponent collapses to zero.
  bool degenerate() const { return min_delta == 0.0; }
};

/// M-ary PSK on one mode: state m (zero-based) sits at phase (2m+1)pi/M with
/// |alpha| = sqrt(N); equal priors. M = 4 gives the diagonal QPSK layout.
CoherentEnsemble build_psk(int M, double N);

/// M-ary PPM: state m carries sqrt(N) in mode m and vacuum elsewhere.
CoherentEnsemble build_ppm(int M, double N);

/// Reads the JSON ensemble format:
///   {"kind": "coherent" | "pure", "priors": [...], "states": [[[re, im], ...], ...]}
AnyEnsemble load_ensemble(const std::filesystem::path& path);
AnyEnsemble parse_ensemble(const std::string& json_text);
std::string serialize_ensemble(const AnyEnsemble& ensemble);

double average_energy(const CoherentEnsemble& ens);
EnsembleGeometry geometry(const CoherentEnsemble& ens);

/// Multiplies every amplitude by sqrt(target / avg_energy).
CoherentEnsemble scale_to_energy(const CoherentEnsemble& ens, double target);

/// <alpha_m|alpha_m'> = exp(-|a|^2/2 - |b|^2/2 + a^H b).  Evaluated as
/// exp(-||a - b||^2 / 2 + i Im(a^H b)), which is the same number with
/// |overlap|^2 = exp(-delta) holding to rounding.
std::complex<double> coherent_overlap(const CoherentEnsemble& ens, std::size_t m, std::size_t mp);
Eigen::MatrixXcd coherent_overlap_matrix(const CoherentEnsemble& ens);

/// Vectors in dimension rank(G) <= M whose Gram matrix reproduces the
/// coherent overlap matrix G. Throws if G has an eigenvalue below -kPsdTolerance.
PureStateEnsemble coherent_as_pure(const CoherentEnsemble& ens);

}  // namespace nullrx
