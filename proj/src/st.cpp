#include "nullrx/st.hpp"

#include <cmath>
#include <cstdio>

#include "nullrx/error.hpp"

namespace nullrx {
namespace {

void check_copies(int copies) {
  if (copies < 1) throw ValidationError("copy count n must be at least 1");
}

}  // namespace

FidelityMatrix fidelity_matrix(const PureStateEnsemble& ens) {
  const auto M = static_cast<Eigen::Index>(ens.size());
  FidelityMatrix fid;
  fid.entries = Eigen::MatrixXd::Identity(M, M);
  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index j = i + 1; j < M; ++j) {
      const double f = std::min(1.0, std::norm(ens.vector(i).dot(ens.vector(j))));
      fid.entries(i, j) = fid.entries(j, i) = f;
      fid.f_max = std::max(fid.f_max, f);
    }
  }
  return fid;
}

StepLaw st_step_law(const FidelityMatrix& fid) {
  StepLaw law;
  law.stay = fid.entries;
  law.advance = (1.0 - fid.entries.array()).matrix();
  // A state never fails the test for itself.
  law.advance.diagonal().setZero();
  law.stay.diagonal().setOnes();
  return law;
}

ErrorReport st_exact_error(const FidelityMatrix& fid, std::span<const double> priors, int copies) {
  check_copies(copies);
  return sequential_error(st_step_law(fid), priors, copies);
}

ErrorReport st_exact_error(const PureStateEnsemble& ens, int copies) {
  return st_exact_error(fidelity_matrix(ens), ens.priors(), copies);
}

double st_upper_bound(const PureStateEnsemble& ens, int copies) {
  check_copies(copies);
  return click_count_bound(ens.priors(), copies, std::log(fidelity_matrix(ens).f_max));
}

SimEstimate st_simulate(const PureStateEnsemble& ens, int copies, std::int64_t trials,
                        std::uint64_t seed) {
  check_copies(copies);
  return simulate_sequential(st_step_law(fidelity_matrix(ens)), ens.priors(), copies, trials,
                             seed);
}

std::string Exponent::to_string() const {
  if (unbounded_) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value_);
  return buf;
}

Exponent qce(const FidelityMatrix& fid) {
  if (fid.f_max <= 0.0) return Exponent::unbounded();
  return Exponent::finite(-std::log(fid.f_max));
}

Exponent qce(const PureStateEnsemble& ens) { return qce(fidelity_matrix(ens)); }

}  // namespace nullrx
