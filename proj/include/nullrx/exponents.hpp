#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nullrx/ensemble.hpp"

namespace nullrx {

enum class ReceiverKind {
  SwnExact,
  SwnBound,
  SwnSim,
  StExact,
  StBound,
  StSim,
  Srm,
  HetUnion,
  HetQpsk,
  DdPpm,
};

/// What a curve value is: an exact error, an upper bound or a simulation.
enum class ValueKind { Exact, Bound, Sim };

/// A receiver and its parameters. `steps` is the slice count L for the
/// nulling receiver; the testing receiver takes its copy count from the
/// sweep axis.
struct ReceiverSpec {
  ReceiverKind kind = ReceiverKind::SwnExact;
  int steps = 0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;

  /// e.g. "swn_L12", "st", "srm", "het_union".
  std::string label() const;
  ValueKind value_kind() const;
};

/// Parses the command-line receiver names: swn-exact, swn-bound, swn-sim,
/// st-exact, st-bound, st-sim, srm, het-union, het-qpsk, dd-ppm.
ReceiverKind parse_receiver_kind(std::string_view name);
std::string_view receiver_kind_name(ReceiverKind kind);
std::string_view value_kind_name(ValueKind kind);

/// Whether the sweep axis is average photon number or copy count.
enum class SweepAxis { Photons, Copies };

/// Axis implied by a receiver on an ensemble. Throws ValidationError for an
/// incompatible pairing, naming both sides.
SweepAxis sweep_axis(const ReceiverSpec& spec, const AnyEnsemble& family);

/// Error probability (or bound) of `spec` at sweep coordinate x. Coherent
/// families are rescaled to average energy x; on the copy axis x is the
/// number of copies and must be a positive integer.
double evaluate(const ReceiverSpec& spec, const AnyEnsemble& family, double x);

struct SweepPoint {
  double x = 0.0;
  double p_e = 0.0;
};

/// Ordered samples of one receiver on one ensemble family. x is strictly
/// increasing and every p_e is positive. Bounds may exceed one.
struct SweepCurve {
  std::string label;
  ValueKind kind = ValueKind::Exact;
  std::vector<SweepPoint> points;
};

struct SweepOptions {
  /// Points with p_e below this (or exactly zero) are dropped.
  double floor = 1e-30;
};

struct SweepResult {
  SweepCurve curve;
  /// Grid coordinates whose value fell below the floor.
  std::vector<double> dropped;
};

/// Evaluates `spec` at every grid coordinate (in parallel). Throws on an
/// empty or non-increasing grid, an incompatible receiver, or when every
/// point is dropped.
SweepResult sweep(const ReceiverSpec& spec, const AnyEnsemble& family, std::span<const double> grid,
                  const SweepOptions& options = {});

/// n equally spaced points from lo to hi inclusive (log-spaced when `log`).
std::vector<double> make_grid(double lo, double hi, int n, bool log = false);

struct FitWindow {
  double lo = 0.0;
  double hi = 0.0;
};

struct FitOptions {
  /// Restricts x; by default every point with p_e in [min_p, max_p] is used.
  std::optional<FitWindow> window;
  double min_p = 1e-28;
  double max_p = 1e-2;
};

/// Log-domain residual above which a fit is flagged as pre-asymptotic.
inline constexpr double kPreAsymptoticResidual = 0.5;
inline constexpr std::size_t kMinFitPoints = 5;

/// Least-squares line through (x, -ln p_e).
struct ExponentEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  double max_abs_residual = 0.0;
  /// x range of the points actually used.
  FitWindow window;
  std::size_t points = 0;

  bool pre_asymptotic() const { return max_abs_residual > kPreAsymptoticResidual; }
};

/// Empirical error exponent of a curve. Throws ValidationError when fewer
/// than five points are usable.
ExponentEstimate fit_epe(const SweepCurve& curve, const FitOptions& options = {});

/// True for four equiprobable single-mode states of equal energy forming a
/// square about the origin.
bool is_qpsk(const CoherentEnsemble& ens);
/// True for M equiprobable equal-energy states each on its own mode, S = M.
bool is_ppm(const CoherentEnsemble& ens);

}  // namespace nullrx
