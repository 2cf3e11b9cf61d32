#include "nullrx/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nullrx/bounds.hpp"
#include "nullrx/error.hpp"
#include "nullrx/parallel.hpp"
#include "nullrx/st.hpp"
#include "nullrx/swn.hpp"

namespace nullrx {
namespace {

constexpr double kShapeTolerance = 1e-9;

struct KindName {
  ReceiverKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {ReceiverKind::SwnExact, "swn-exact"}, {ReceiverKind::SwnBound, "swn-bound"},
    {ReceiverKind::SwnSim, "swn-sim"},     {ReceiverKind::StExact, "st-exact"},
    {ReceiverKind::StBound, "st-bound"},   {ReceiverKind::StSim, "st-sim"},
    {ReceiverKind::Srm, "srm"},            {ReceiverKind::HetUnion, "het-union"},
    {ReceiverKind::HetQpsk, "het-qpsk"},   {ReceiverKind::DdPpm, "dd-ppm"},
};

bool is_swn(ReceiverKind k) {
  return k == ReceiverKind::SwnExact || k == ReceiverKind::SwnBound || k == ReceiverKind::SwnSim;
}

bool is_st(ReceiverKind k) {
  return k == ReceiverKind::StExact || k == ReceiverKind::StBound || k == ReceiverKind::StSim;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int copies_from(double x) {
  const double r = std::round(x);
  if (!(x >= 1.0) || std::abs(x - r) > 1e-9 || r > std::numeric_limits<int>::max()) {
    throw ValidationError("copy count must be a positive integer, got " + std::to_string(x));
  }
  return static_cast<int>(r);
}

bool equal_priors(const CoherentEnsemble& ens) {
  const double p = 1.0 / static_cast<double>(ens.size());
  return std::all_of(ens.priors().begin(), ens.priors().end(),
                     [p](double q) { return std::abs(q - p) <= kPriorSumTolerance; });
}

std::string incompatible(const ReceiverSpec& spec, std::string_view why) {
  return "receiver " + std::string(receiver_kind_name(spec.kind)) + " " + std::string(why);
}

}  // namespace

std::string ReceiverSpec::label() const {
  switch (kind) {
    case ReceiverKind::SwnExact:
    case ReceiverKind::SwnBound:
    case ReceiverKind::SwnSim:
      return "swn_L" + std::to_string(steps);
    case ReceiverKind::StExact:
    case ReceiverKind::StBound:
    case ReceiverKind::StSim:
      return "st";
    case ReceiverKind::Srm:
      return "srm";
    case ReceiverKind::HetUnion:
      return "het_union";
    case ReceiverKind::HetQpsk:
      return "heterodyne";
    case ReceiverKind::DdPpm:
      return "direct_detection";
  }
  return "unknown";
}

ValueKind ReceiverSpec::value_kind() const {
  switch (kind) {
    case ReceiverKind::SwnBound:
    case ReceiverKind::StBound:
    case ReceiverKind::HetUnion:
      return ValueKind::Bound;
    case ReceiverKind::SwnSim:
    case ReceiverKind::StSim:
      return ValueKind::Sim;
    default:
      return ValueKind::Exact;
  }
}

ReceiverKind parse_receiver_kind(std::string_view name) {
  for (const auto& [kind, n] : kKindNames) {
    if (n == name) return kind;
  }
  throw ValidationError("unknown receiver \"" + std::string(name) + "\"");
}

std::string_view receiver_kind_name(ReceiverKind kind) {
  for (const auto& [k, n] : kKindNames) {
    if (k == kind) return n;
  }
  return "unknown";
}

std::string_view value_kind_name(ValueKind kind) {
  switch (kind) {
    case ValueKind::Exact:
      return "exact";
    case ValueKind::Bound:
      return "bound";
    case ValueKind::Sim:
      return "sim";
  }
  return "unknown";
}

bool is_qpsk(const CoherentEnsemble& ens) {
  if (ens.size() != 4 || ens.modes() != 1 || !equal_priors(ens)) return false;
  const std::complex<double> a0 = ens.state(0)(0);
  const double r = std::abs(a0);
  if (r == 0.0) return false;
  // The set of points must be {a0, i a0, -a0, -i a0}.
  std::complex<double> rot = 1.0;
  for (int j = 0; j < 4; ++j, rot *= std::complex<double>(0.0, 1.0)) {
    bool found = false;
    for (std::size_t k = 0; k < 4; ++k) {
      if (std::abs(ens.state(k)(0) - rot * a0) <= kShapeTolerance * r) found = true;
    }
    if (!found) return false;
  }
  return true;
}

bool is_ppm(const CoherentEnsemble& ens) {
  const std::size_t M = ens.size();
  if (ens.modes() != M || !equal_priors(ens)) return false;
  const double energy = ens.state(0).squaredNorm();
  if (energy == 0.0) return false;
  std::vector<bool> used(M, false);
  for (std::size_t m = 0; m < M; ++m) {
    const auto& a = ens.state(m);
    if (std::abs(a.squaredNorm() - energy) > kShapeTolerance * energy) return false;
    Eigen::Index mode = 0;
    a.cwiseAbs2().maxCoeff(&mode);
    if (used[static_cast<std::size_t>(mode)]) return false;
    used[static_cast<std::size_t>(mode)] = true;
    if (a.squaredNorm() - std::norm(a(mode)) > kShapeTolerance * energy) return false;
  }
  return true;
}

SweepAxis sweep_axis(const ReceiverSpec& spec, const AnyEnsemble& family) {
  const auto* coherent = std::get_if<CoherentEnsemble>(&family);
  if (is_st(spec.kind)) return SweepAxis::Copies;
  if (spec.kind == ReceiverKind::Srm) return coherent ? SweepAxis::Photons : SweepAxis::Copies;
  if (!coherent) throw ValidationError(incompatible(spec, "needs a coherent-state ensemble"));
  if (is_swn(spec.kind) && spec.steps < 1) {
    throw ValidationError(incompatible(spec, "needs a slice count L >= 1"));
  }
  if (spec.kind == ReceiverKind::HetQpsk && !is_qpsk(*coherent)) {
    throw ValidationError(incompatible(spec, "needs an equiprobable QPSK ensemble"));
  }
  if (spec.kind == ReceiverKind::DdPpm && !is_ppm(*coherent)) {
    throw ValidationError(incompatible(spec, "needs an equiprobable PPM ensemble"));
  }
  if ((spec.kind == ReceiverKind::SwnSim) && spec.trials < 1) {
    throw ValidationError(incompatible(spec, "needs trials >= 1"));
  }
  return SweepAxis::Photons;
}

double evaluate(const ReceiverSpec& spec, const AnyEnsemble& family, double x) {
  const SweepAxis axis = sweep_axis(spec, family);
  if (axis == SweepAxis::Copies) {
    const int n = copies_from(x);
    if (spec.kind == ReceiverKind::Srm) {
      return srm_error(std::get<PureStateEnsemble>(family), n);
    }
    const PureStateEnsemble pure = std::holds_alternative<PureStateEnsemble>(family)
                                       ? std::get<PureStateEnsemble>(family)
                                       : coherent_as_pure(std::get<CoherentEnsemble>(family));
    switch (spec.kind) {
      case ReceiverKind::StExact:
        return st_exact_error(pure, n).average;
      case ReceiverKind::StBound:
        return st_upper_bound(pure, n);
      case ReceiverKind::StSim:
        if (spec.trials < 1) throw ValidationError(incompatible(spec, "needs trials >= 1"));
        return st_simulate(pure, n, spec.trials, spec.seed).point;
      default:
        break;
    }
    throw ValidationError(incompatible(spec, "is not defined on the copy axis"));
  }

  if (!(x > 0.0) || !std::isfinite(x)) {
    throw ValidationError("average photon number must be positive, got " + std::to_string(x));
  }
  const CoherentEnsemble ens = scale_to_energy(std::get<CoherentEnsemble>(family), x);
  switch (spec.kind) {
    case ReceiverKind::SwnExact:
      return swn_exact_error(ens, spec.steps).average;
    case ReceiverKind::SwnBound:
      return swn_upper_bound(ens, spec.steps);
    case ReceiverKind::SwnSim:
      return swn_simulate(ens, spec.steps, spec.trials, spec.seed).point;
    case ReceiverKind::Srm:
      return srm_error(ens);
    case ReceiverKind::HetUnion:
      return heterodyne_union_bound(ens);
    case ReceiverKind::HetQpsk:
      return heterodyne_qpsk_exact(x);
    case ReceiverKind::DdPpm:
      return direct_detection_ppm_error(static_cast<int>(ens.size()), x);
    default:
      break;
  }
  throw ValidationError(incompatible(spec, "is not defined on the photon axis"));
}

SweepResult sweep(const ReceiverSpec& spec, const AnyEnsemble& family, std::span<const double> grid,
                  const SweepOptions& options) {
  if (grid.empty()) throw ValidationError("sweep: empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ValidationError("sweep: grid must be strictly increasing");
  }
  sweep_axis(spec, family);

  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    ReceiverSpec point_spec = spec;
    point_spec.seed = splitmix64(spec.seed + i);
    values[i] = evaluate(point_spec, family, grid[i]);
  });

  SweepResult result;
  result.curve.label = spec.label();
  result.curve.kind = spec.value_kind();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (values[i] > 0.0 && values[i] >= options.floor) {
      result.curve.points.push_back({grid[i], values[i]});
    } else {
      result.dropped.push_back(grid[i]);
    }
  }
  if (result.curve.points.empty()) {
    throw ValidationError("sweep: every point of " + result.curve.label + " fell below the floor");
  }
  return result;
}

std::vector<double> make_grid(double lo, double hi, int n, bool log) {
  if (n < 1) throw ValidationError("grid: need at least one point");
  if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
    throw ValidationError("grid: bounds must be positive and ordered");
  }
  if (n == 1) {
    if (lo != hi) throw ValidationError("grid: a single point needs min == max");
    return {lo};
  }
  if (!(hi > lo)) throw ValidationError("grid: max must exceed min");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    g[static_cast<std::size_t>(i)] = log ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                                         : lo + (hi - lo) * i / (n - 1);
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

ExponentEstimate fit_epe(const SweepCurve& curve, const FitOptions& options) {
  std::vector<double> xs, ys;
  for (const auto& p : curve.points) {
    if (options.window && (p.x < options.window->lo || p.x > options.window->hi)) continue;
    if (!(p.p_e >= options.min_p) || !(p.p_e <= options.max_p)) continue;
    xs.push_back(p.x);
    ys.push_back(-std::log(p.p_e));
  }
  if (xs.size() < kMinFitPoints) {
    throw ValidationError("fit_epe: " + curve.label + " has " + std::to_string(xs.size()) +
                          " usable points, need at least " + std::to_string(kMinFitPoints));
  }

  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw ValidationError("fit_epe: all usable points share one x");

  ExponentEstimate est;
  est.slope = sxy / sxx;
  est.intercept = my - est.slope * mx;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    est.max_abs_residual =
        std::max(est.max_abs_residual, std::abs(ys[i] - (est.intercept + est.slope * xs[i])));
  }
  est.window = {xs.front(), xs.back()};
  est.points = xs.size();
  return est;
}

}  // namespace nullrx
