#pragma once

#include <cstdint>
#include <string>

#include "nullrx/ensemble.hpp"
#include "nullrx/report.hpp"
#include "nullrx/sequential.hpp"

namespace nullrx {

// Sequential testing on n copies of a pure state: copy l is measured with
// the binary projector {|psi_mu><psi_mu|, 1 - |psi_mu><psi_mu|}; the
// orthogonal outcome moves mu to mu + 1. The decision is the final mu.

/// Pairwise fidelities |<psi_m|psi_m'>|^2; unit diagonal, symmetric.
struct FidelityMatrix {
  Eigen::MatrixXd entries;
  /// Largest off-diagonal entry.
  double f_max = 0.0;
};

FidelityMatrix fidelity_matrix(const PureStateEnsemble& ens);

/// Per-copy law: stay(mu, m) = F(mu, m), advance(mu, m) = 1 - F(mu, m).
StepLaw st_step_law(const FidelityMatrix& fid);

ErrorReport st_exact_error(const PureStateEnsemble& ens, int copies);
ErrorReport st_exact_error(const FidelityMatrix& fid, std::span<const double> priors, int copies);

/// sum_m pi_m sum_{K=0}^{m-2} C(n, K) F_max^(n-K), with one-based m.
double st_upper_bound(const PureStateEnsemble& ens, int copies);

SimEstimate st_simulate(const PureStateEnsemble& ens, int copies, std::int64_t trials,
                        std::uint64_t seed);

/// Error exponent that may be unbounded (orthogonal states never err).
class Exponent {
 public:
  static Exponent finite(double value) { return Exponent(value, false); }
  static Exponent unbounded() { return Exponent(0.0, true); }

  bool is_unbounded() const { return unbounded_; }
  /// Meaningless when is_unbounded().
  double value() const { return value_; }
  /// Decimal text with 17 significant digits, or "inf".
  std::string to_string() const;

  friend bool operator==(const Exponent&, const Exponent&) = default;

 private:
  Exponent(double value, bool unbounded) : value_(value), unbounded_(unbounded) {}
  double value_;
  bool unbounded_;
};

/// Quantum Chernoff exponent of a pure-state ensemble: -ln F_max.
Exponent qce(const PureStateEnsemble& ens);
Exponent qce(const FidelityMatrix& fid);

}  // namespace nullrx
