#include "nullrx/ensemble.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "nullrx/error.hpp"

namespace nullrx {
namespace {

using json = nlohmann::json;

// Eigenvalues of the overlap matrix at or below this are dropped when
// factoring it into vectors; duplicated states land here.
constexpr double kRankTolerance = 1e-12;

void validate_priors(const std::vector<double>& priors, std::size_t count) {
  if (priors.size() != count) {
    throw ValidationError("priors: expected " + std::to_string(count) + " entries, got " +
                          std::to_string(priors.size()));
  }
  double sum = 0.0;
  for (std::size_t m = 0; m < priors.size(); ++m) {
    if (!std::isfinite(priors[m]) || priors[m] < 0.0) {
      throw ValidationError("priors: entry " + std::to_string(m) + " is negative or not finite");
    }
    sum += priors[m];
  }
  if (std::abs(sum - 1.0) > kPriorSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "priors: sum to " << sum << ", expected 1";
    throw ValidationError(msg.str());
  }
}

template <typename Vec>
void validate_vectors(const std::vector<Vec>& vs, const char* what) {
  if (vs.size() < 2) {
    throw ValidationError(std::string(what) + ": need at least 2 states, got " +
                          std::to_string(vs.size()));
  }
  const auto dim = vs.front().size();
  if (dim < 1) throw ValidationError(std::string(what) + ": state 0 is empty");
  for (std::size_t m = 0; m < vs.size(); ++m) {
    if (vs[m].size() != dim) {
      throw ValidationError(std::string(what) + ": state " + std::to_string(m) + " has " +
                            std::to_string(vs[m].size()) + " components, state 0 has " +
                            std::to_string(dim));
    }
    if (!vs[m].allFinite()) {
      throw ValidationError(std::string(what) + ": state " + std::to_string(m) +
                            " has a non-finite component");
    }
  }
}

std::vector<Eigen::VectorXcd> parse_states(const json& states) {
  if (!states.is_array()) throw ValidationError("states: expected an array");
  std::vector<Eigen::VectorXcd> out;
  out.reserve(states.size());
  for (std::size_t m = 0; m < states.size(); ++m) {
    const auto& row = states[m];
    if (!row.is_array()) {
      throw ValidationError("states: state " + std::to_string(m) + " is not an array");
    }
    Eigen::VectorXcd v(static_cast<Eigen::Index>(row.size()));
    for (std::size_t s = 0; s < row.size(); ++s) {
      const auto& c = row[s];
      if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) {
        throw ValidationError("states: state " + std::to_string(m) + " component " +
                              std::to_string(s) + " is not a [re, im] pair");
      }
      v(static_cast<Eigen::Index>(s)) = {c[0].get<double>(), c[1].get<double>()};
    }
    out.push_back(std::move(v));
  }
  return out;
}

json dump_states(std::span<const Eigen::VectorXcd> states) {
  json out = json::array();
  for (const auto& v : states) {
    json row = json::array();
    for (Eigen::Index s = 0; s < v.size(); ++s) row.push_back({v(s).real(), v(s).imag()});
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

CoherentEnsemble::CoherentEnsemble(std::vector<Amplitudes> states, std::vector<double> priors)
    : states_(std::move(states)), priors_(std::move(priors)) {
  validate_vectors(states_, "coherent ensemble");
  validate_priors(priors_, states_.size());
}

PureStateEnsemble::PureStateEnsemble(std::vector<Eigen::VectorXcd> vectors,
                                     std::vector<double> priors)
    : vectors_(std::move(vectors)), priors_(std::move(priors)) {
  validate_vectors(vectors_, "pure ensemble");
  for (std::size_t m = 0; m < vectors_.size(); ++m) {
    const double norm = vectors_[m].norm();
    if (std::abs(norm - 1.0) > kUnitNormTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "pure ensemble: state " << m << " has norm " << norm << ", expected 1";
      throw ValidationError(msg.str());
    }
  }
  validate_priors(priors_, vectors_.size());
}

CoherentEnsemble build_psk(int M, double N) {
  if (M < 2) throw ValidationError("psk: M must be at least 2");
  if (!(N > 0.0) || !std::isfinite(N)) throw ValidationError("psk: N must be positive");
  const double r = std::sqrt(N);
  std::vector<Amplitudes> states;
  for (int m = 0; m < M; ++m) {
    const double phase = (2.0 * m + 1.0) * std::numbers::pi / M;
    Amplitudes a(1);
    a(0) = std::polar(r, phase);
    states.push_back(std::move(a));
  }
  return {std::move(states), std::vector<double>(static_cast<std::size_t>(M), 1.0 / M)};
}

CoherentEnsemble build_ppm(int M, double N) {
  if (M < 2) throw ValidationError("ppm: M must be at least 2");
  if (!(N > 0.0) || !std::isfinite(N)) throw ValidationError("ppm: N must be positive");
  std::vector<Amplitudes> states;
  for (int m = 0; m < M; ++m) {
    Amplitudes a = Amplitudes::Zero(M);
    a(m) = std::sqrt(N);
    states.push_back(std::move(a));
  }
  return {std::move(states), std::vector<double>(static_cast<std::size_t>(M), 1.0 / M)};
}

AnyEnsemble parse_ensemble(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("ensemble file: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("ensemble file: top level must be an object");
  if (!doc.contains("kind") || !doc["kind"].is_string()) {
    throw ValidationError("kind: missing or not a string");
  }
  if (!doc.contains("priors") || !doc["priors"].is_array()) {
    throw ValidationError("priors: missing or not an array");
  }
  if (!doc.contains("states")) throw ValidationError("states: missing");

  std::vector<double> priors;
  for (std::size_t m = 0; m < doc["priors"].size(); ++m) {
    const auto& p = doc["priors"][m];
    if (!p.is_number()) throw ValidationError("priors: entry " + std::to_string(m) + " is not a number");
    priors.push_back(p.get<double>());
  }
  auto states = parse_states(doc["states"]);

  const auto kind = doc["kind"].get<std::string>();
  if (kind == "coherent") return CoherentEnsemble(std::move(states), std::move(priors));
  if (kind == "pure") return PureStateEnsemble(std::move(states), std::move(priors));
  throw ValidationError("kind: expected \"coherent\" or \"pure\", got \"" + kind + "\"");
}

AnyEnsemble load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return parse_ensemble(buf.str());
}

std::string serialize_ensemble(const AnyEnsemble& ensemble) {
  json doc;
  std::visit(
      [&doc](const auto& ens) {
        using T = std::decay_t<decltype(ens)>;
        if constexpr (std::is_same_v<T, CoherentEnsemble>) {
          doc["kind"] = "coherent";
          doc["states"] = dump_states(ens.states());
        } else {
          doc["kind"] = "pure";
          doc["states"] = dump_states(ens.vectors());
        }
        doc["priors"] = std::vector<double>(ens.priors().begin(), ens.priors().end());
      },
      ensemble);
  return doc.dump(2);
}

double average_energy(const CoherentEnsemble& ens) {
  double n = 0.0;
  for (std::size_t m = 0; m < ens.size(); ++m) n += ens.prior(m) * ens.state(m).squaredNorm();
  return n;
}

EnsembleGeometry geometry(const CoherentEnsemble& ens) {
  const auto M = static_cast<Eigen::Index>(ens.size());
  EnsembleGeometry g;
  g.delta = Eigen::MatrixXd::Zero(M, M);
  g.min_delta = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index j = i + 1; j < M; ++j) {
      const double d = (ens.state(i) - ens.state(j)).squaredNorm();
      g.delta(i, j) = d;
      g.delta(j, i) = d;
      g.min_delta = std::min(g.min_delta, d);
    }
  }
  g.avg_energy = average_energy(ens);
  if (!(g.avg_energy > 0.0)) {
    throw ValidationError("geometry: average energy is zero, kappa is undefined");
  }
  g.kappa = g.min_delta / g.avg_energy;
  return g;
}

CoherentEnsemble scale_to_energy(const CoherentEnsemble& ens, double target) {
  if (!(target > 0.0) || !std::isfinite(target)) {
    throw ValidationError("scale_to_energy: target energy must be positive");
  }
  const double n = average_energy(ens);
  if (!(n > 0.0)) throw ValidationError("scale_to_energy: ensemble has zero average energy");
  if (n == target) return ens;
  const double factor = std::sqrt(target / n);
  std::vector<Amplitudes> states(ens.states().begin(), ens.states().end());
  for (auto& a : states) a *= factor;
  return {std::move(states), std::vector<double>(ens.priors().begin(), ens.priors().end())};
}

std::complex<double> coherent_overlap(const CoherentEnsemble& ens, std::size_t m, std::size_t mp) {
  const auto& a = ens.state(m);
  const auto& b = ens.state(mp);
  if (m == mp) return 1.0;
  // a.dot(b) conjugates a.
  const double phase = a.dot(b).imag();
  return std::polar(std::exp(-0.5 * (a - b).squaredNorm()), phase);
}

Eigen::MatrixXcd coherent_overlap_matrix(const CoherentEnsemble& ens) {
  const auto M = static_cast<Eigen::Index>(ens.size());
  Eigen::MatrixXcd G(M, M);
  for (Eigen::Index i = 0; i < M; ++i) {
    G(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < M; ++j) {
      G(i, j) = coherent_overlap(ens, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      G(j, i) = std::conj(G(i, j));
    }
  }
  return G;
}

PureStateEnsemble coherent_as_pure(const CoherentEnsemble& ens) {
  const Eigen::MatrixXcd G = coherent_overlap_matrix(ens);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(G);
  if (eig.info() != Eigen::Success) throw ValidationError("coherent_as_pure: eigensolver failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const Eigen::MatrixXcd& V = eig.eigenvectors();

  std::vector<Eigen::Index> kept;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (lambda(k) < -kPsdTolerance) {
      throw ValidationError("coherent_as_pure: overlap matrix has eigenvalue " +
                            std::to_string(lambda(k)) + ", not positive semidefinite");
    }
    if (lambda(k) > kRankTolerance) kept.push_back(k);
  }

  // G = V diag(lambda) V^H, so psi_m[k] = sqrt(lambda_k) conj(V(m, k)) has
  // <psi_i|psi_j> = sum_k lambda_k V(i, k) conj(V(j, k)) = G(i, j).
  std::vector<Eigen::VectorXcd> vectors;
  for (Eigen::Index m = 0; m < G.rows(); ++m) {
    Eigen::VectorXcd psi(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t r = 0; r < kept.size(); ++r) {
      psi(static_cast<Eigen::Index>(r)) = std::sqrt(lambda(kept[r])) * std::conj(V(m, kept[r]));
    }
    vectors.push_back(std::move(psi));
  }
  return {std::move(vectors), std::vector<double>(ens.priors().begin(), ens.priors().end())};
}

}  // namespace nullrx
