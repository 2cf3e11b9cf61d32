#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nullrx/exponents.hpp"

namespace nullrx::cli {

/// Parsed `min:max:points[:log]` or a single value.
struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  int points = 1;
  bool log = false;

  std::vector<double> values() const;
};

Grid parse_grid(std::string_view text);
/// `lo:hi` with lo < hi.
FitWindow parse_window(std::string_view text);
/// Accepts integer text or exponent notation such as 1e6.
std::int64_t parse_count(std::string_view text);

/// One CSV line of the output schema `x,receiver,kind,value,flag`.
struct CsvRow {
  double x = 0.0;
  std::string receiver;
  std::string kind;
  double value = 0.0;
  std::string flag;
};

inline constexpr std::string_view kCsvHeader = "x,receiver,kind,value,flag";
/// Curve values above this are written as the cap with flag "capped".
inline constexpr double kValueCap = 10.0;

/// %.17g
std::string format_number(double v);
std::string render_csv(const std::vector<CsvRow>& rows);

/// Curve rows. Simulated curves carry `ci=<halfwidth>` computed from
/// `trials`; values above kValueCap are capped and flagged.
void append_curve(std::vector<CsvRow>& rows, const SweepCurve& curve, std::int64_t trials = 0);
/// Fit row: x is the window start, value is the slope, flag
/// `window=lo:hi` plus `;pre_asymptotic` when flagged.
void append_fit(std::vector<CsvRow>& rows, const std::string& receiver, const ExponentEstimate& est);

/// QPSK comparison: helstrom, SWN exact and bound for L in {4, 8, 12},
/// heterodyne, and fitted exponents.
std::string render_fig3();
/// PPM(6) comparison: helstrom, SWN exact for L in {8, 16, 64}, direct
/// detection, heterodyne union bound, and fitted exponents.
std::string render_fig4();
/// Printed by fig4.
inline constexpr std::string_view kFig4Note =
    "note: fig4 omits the conditional pulse nulling receiver and the lower bound on its error";

/// Writes to a temporary sibling and renames it over `path`. IoError on failure.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Entry point. Returns 0 on success, 1 on validation errors, 2 on I/O errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nullrx::cli
