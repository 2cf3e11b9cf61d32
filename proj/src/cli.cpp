#include "nullrx/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <unistd.h>

#include <CLI11.hpp>

#include "nullrx/bounds.hpp"
#include "nullrx/error.hpp"
#include "nullrx/st.hpp"
#include "nullrx/swn.hpp"

namespace nullrx::cli {
namespace {

double parse_number(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ValidationError(std::string(what) + ": cannot parse \"" + std::string(text) + "\"");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) return parts;
    start = pos + 1;
  }
}

/// Sweep plus the rows and fit for one figure curve.
struct FigureCurve {
  ReceiverSpec spec;
  std::string label;
};

SweepCurve relabeled(SweepCurve curve, const std::string& label) {
  curve.label = label;
  return curve;
}

void add_fit(std::vector<CsvRow>& rows, const FigureCurve& c, const AnyEnsemble& family, FitWindow w,
             int points, double floor = 1e-30) {
  const auto grid = make_grid(w.lo, w.hi, points);
  const auto curve = relabeled(sweep(c.spec, family, grid, {.floor = floor}).curve, c.label);
  FitOptions opts;
  opts.window = w;
  opts.min_p = floor;
  append_fit(rows, c.label, fit_epe(curve, opts));
}

std::string render_figure(const AnyEnsemble& family, const std::vector<double>& grid,
                          const std::vector<FigureCurve>& curves,
                          const std::vector<std::pair<FigureCurve, FitWindow>>& fits,
                          double deep_floor_from) {
  std::vector<CsvRow> rows;
  for (const auto& c : curves) append_curve(rows, relabeled(sweep(c.spec, family, grid).curve, c.label));
  for (const auto& [c, w] : fits) {
    const double floor = w.lo >= deep_floor_from ? 1e-300 : 1e-30;
    add_fit(rows, c, family, w, static_cast<int>(std::lround(w.hi - w.lo)) + 1, floor);
  }
  return render_csv(rows);
}

AnyEnsemble build_family(const std::string& source, int M) {
  if (source == "psk") return build_psk(M, 1.0);
  if (source == "ppm") return build_ppm(M, 1.0);
  if (source.starts_with("file:")) return load_ensemble(source.substr(5));
  throw ValidationError("ensemble must be psk, ppm or file:<path>, got \"" + source + "\"");
}

struct Options {
  std::string ensemble = "psk";
  int M = 4;
  int L = 0;
  std::string n_grid;
  std::string copies_grid;
  std::string receiver;
  std::string trials = "100000";
  std::uint64_t seed = 1;
  std::string out;
  std::string window;
};

void emit(const Options& o, const std::string& content, std::ostream& out) {
  if (o.out.empty()) {
    out << content;
  } else {
    write_atomic(o.out, content);
  }
}

ReceiverSpec receiver_from(const Options& o) {
  ReceiverSpec spec;
  spec.kind = parse_receiver_kind(o.receiver);
  spec.steps = o.L;
  spec.trials = parse_count(o.trials);
  spec.seed = o.seed;
  return spec;
}

std::vector<double> axis_grid(const Options& o, SweepAxis axis) {
  const std::string& text = axis == SweepAxis::Photons ? o.n_grid : o.copies_grid;
  if (text.empty()) {
    throw ValidationError(axis == SweepAxis::Photons ? "this receiver sweeps photons: pass --n <grid>"
                                                     : "this receiver sweeps copies: pass --copies <grid>");
  }
  return parse_grid(text).values();
}

void cmd_sweep(const Options& o, std::ostream& out) {
  const auto family = build_family(o.ensemble, o.M);
  const auto spec = receiver_from(o);
  const auto grid = axis_grid(o, sweep_axis(spec, family));
  std::vector<CsvRow> rows;
  const auto result = sweep(spec, family, grid);
  append_curve(rows, result.curve, spec.trials);
  if (!o.window.empty()) {
    FitOptions opts;
    opts.window = parse_window(o.window);
    append_fit(rows, result.curve.label, fit_epe(result.curve, opts));
  }
  emit(o, render_csv(rows), out);
}

void cmd_simulate(const Options& o, std::ostream& out) {
  const auto family = build_family(o.ensemble, o.M);
  ReceiverSpec spec = receiver_from(o);
  if (spec.value_kind() != ValueKind::Sim) {
    throw ValidationError("simulate needs swn-sim or st-sim, got " + o.receiver);
  }
  const auto grid = axis_grid(o, sweep_axis(spec, family));
  ReceiverSpec exact = spec;
  exact.kind = spec.kind == ReceiverKind::SwnSim ? ReceiverKind::SwnExact : ReceiverKind::StExact;
  std::vector<CsvRow> rows;
  append_curve(rows, sweep(spec, family, grid, {.floor = 0.0}).curve, spec.trials);
  append_curve(rows, sweep(exact, family, grid, {.floor = 0.0}).curve);
  emit(o, render_csv(rows), out);
}

void cmd_exponents(const Options& o, std::ostream& out) {
  const auto family = build_family(o.ensemble, o.M);
  std::ostringstream s;
  auto line = [&](std::string_view key, const std::string& value) { s << key << ',' << value << '\n'; };
  std::optional<FitWindow> window;
  if (!o.window.empty()) window = parse_window(o.window);

  auto fitted = [&](const ReceiverSpec& spec, std::vector<double> grid, double floor) {
    const std::string key = "fit_" + spec.label();
    try {
      const auto curve = sweep(spec, family, grid, {.floor = floor}).curve;
      FitOptions opts;
      opts.window = window;
      opts.min_p = floor;
      const auto est = fit_epe(curve, opts);
      line(key, format_number(est.slope) + (est.pre_asymptotic() ? " pre_asymptotic" : ""));
    } catch (const ValidationError& e) {
      line(key, std::string("unavailable (") + e.what() + ")");
    }
  };

  if (const auto* ens = std::get_if<CoherentEnsemble>(&family)) {
    const auto g = geometry(*ens);
    if (g.degenerate()) throw ValidationError("degenerate ensemble: two states coincide");
    line("kappa", format_number(helstrom_epe(*ens)));
    line("heterodyne_epe", format_number(heterodyne_epe(*ens)));
    line("ratio", format_number(helstrom_epe(*ens) / heterodyne_epe(*ens)));
    if (o.L > 0) line("swn_exponent_bound_L" + std::to_string(o.L), format_number(swn_exponent_bound(*ens, o.L)));
    const auto grid = parse_grid(o.n_grid.empty() ? "5:25:41" : o.n_grid).values();
    fitted({ReceiverKind::Srm}, grid, 1e-30);
    if (is_qpsk(*ens)) fitted({ReceiverKind::HetQpsk}, grid, 1e-30);
    if (o.L > 0) fitted({ReceiverKind::SwnExact, o.L}, grid, 1e-300);
  } else {
    const auto& pure = std::get<PureStateEnsemble>(family);
    line("qce", qce(pure).to_string());
    if (!qce(pure).is_unbounded()) {
      const auto grid = parse_grid(o.copies_grid.empty() ? "50:200:151" : o.copies_grid).values();
      fitted({ReceiverKind::StExact}, grid, 1e-300);
    }
  }
  emit(o, s.str(), out);
}

}  // namespace

std::vector<double> Grid::values() const { return make_grid(lo, hi, points, log); }

Grid parse_grid(std::string_view text) {
  const auto parts = split(text, ':');
  Grid g;
  if (parts.size() == 1) {
    g.lo = g.hi = parse_number(parts[0], "grid");
  } else if (parts.size() == 3 || parts.size() == 4) {
    g.lo = parse_number(parts[0], "grid min");
    g.hi = parse_number(parts[1], "grid max");
    const double n = parse_number(parts[2], "grid points");
    if (n != std::floor(n) || n < 1 || n > 1e7) throw ValidationError("grid points must be a positive integer");
    g.points = static_cast<int>(n);
    if (parts.size() == 4) {
      if (parts[3] != "log") throw ValidationError("grid suffix must be \"log\"");
      g.log = true;
    }
  } else {
    throw ValidationError("grid must be min:max:points[:log] or a single value, got \"" + std::string(text) +
                          "\"");
  }
  g.values();  // validates
  return g;
}

FitWindow parse_window(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw ValidationError("window must be lo:hi");
  FitWindow w{parse_number(parts[0], "window"), parse_number(parts[1], "window")};
  if (!(w.lo < w.hi)) throw ValidationError("window needs lo < hi");
  return w;
}

std::int64_t parse_count(std::string_view text) {
  const double v = parse_number(text, "count");
  if (v != std::floor(v) || v < 0 || v > 9e15) {
    throw ValidationError("count must be a nonnegative integer, got \"" + std::string(text) + "\"");
  }
  return static_cast<std::int64_t>(v);
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render_csv(const std::vector<CsvRow>& rows) {
  std::string s(kCsvHeader);
  s += '\n';
  for (const auto& r : rows) {
    s += format_number(r.x) + ',' + r.receiver + ',' + r.kind + ',' + format_number(r.value) + ',' + r.flag + '\n';
  }
  return s;
}

void append_curve(std::vector<CsvRow>& rows, const SweepCurve& curve, std::int64_t trials) {
  const std::string kind(value_kind_name(curve.kind));
  for (const auto& p : curve.points) {
    CsvRow row{p.x, curve.label, kind, p.p_e, {}};
    if (curve.kind == ValueKind::Sim && trials > 0) {
      row.flag = "ci=" + format_number(1.96 * std::sqrt(p.p_e * (1 - p.p_e) / static_cast<double>(trials)));
    }
    if (row.value > kValueCap) {
      row.value = kValueCap;
      row.flag = "capped";
    }
    rows.push_back(std::move(row));
  }
}

void append_fit(std::vector<CsvRow>& rows, const std::string& receiver, const ExponentEstimate& est) {
  std::string flag = "window=" + format_number(est.window.lo) + ':' + format_number(est.window.hi);
  if (est.pre_asymptotic()) flag += ";pre_asymptotic";
  rows.push_back({est.window.lo, receiver, "fit", est.slope, std::move(flag)});
}

std::string render_fig3() {
  const AnyEnsemble qpsk = build_psk(4, 1.0);
  std::vector<FigureCurve> curves{{{ReceiverKind::Srm}, "helstrom"}};
  for (int L : {4, 8, 12}) curves.push_back({{ReceiverKind::SwnExact, L}, "swn_L" + std::to_string(L)});
  for (int L : {4, 8, 12}) curves.push_back({{ReceiverKind::SwnBound, L}, "swn_L" + std::to_string(L)});
  curves.push_back({{ReceiverKind::HetQpsk}, "heterodyne"});

  std::vector<std::pair<FigureCurve, FitWindow>> fits{{curves[0], {5.0, 25.0}}};
  for (int i = 1; i <= 3; ++i) fits.push_back({curves[static_cast<std::size_t>(i)], {10.0, 40.0}});
  fits.push_back({curves.back(), {10.0, 40.0}});
  return render_figure(qpsk, make_grid(0.5, 25.0, 50), curves, fits, 1e9);
}

std::string render_fig4() {
  const AnyEnsemble ppm = build_ppm(6, 1.0);
  std::vector<FigureCurve> curves{{{ReceiverKind::Srm}, "helstrom"}};
  for (int L : {8, 16, 64}) curves.push_back({{ReceiverKind::SwnExact, L}, "swn_L" + std::to_string(L)});
  curves.push_back({{ReceiverKind::DdPpm}, "direct_detection"});
  curves.push_back({{ReceiverKind::HetUnion}, "het_union"});

  std::vector<std::pair<FigureCurve, FitWindow>> fits{{curves[0], {5.0, 30.0}}};
  for (int i = 1; i <= 3; ++i) fits.push_back({curves[static_cast<std::size_t>(i)], {60.0, 120.0}});
  fits.push_back({curves[4], {5.0, 30.0}});
  fits.push_back({curves[5], {10.0, 40.0}});
  return render_figure(ppm, make_grid(0.5, 30.0, 60), curves, fits, 60.0);
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename onto " + path.string());
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Error probabilities and exponents of sequential nulling and testing receivers"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--ensemble", o.ensemble, "psk, ppm or file:<path>");
    sub->add_option("--M", o.M, "hypotheses for psk/ppm")->check(CLI::Range(2, 1 << 16));
    sub->add_option("--L", o.L, "slice count")->check(CLI::Range(1, 1 << 20));
    sub->add_option("--n", o.n_grid, "photon grid min:max:points[:log]");
    sub->add_option("--copies", o.copies_grid, "copy grid min:max:points[:log]");
    sub->add_option("--out", o.out, "output file (default stdout)");
    sub->add_option("--window", o.window, "fit window lo:hi");
  };

  auto* fig3 = app.add_subcommand("fig3", "QPSK comparison curves");
  fig3->add_option("--out", o.out, "output file (default stdout)");
  auto* fig4 = app.add_subcommand("fig4", "PPM(6) comparison curves");
  fig4->add_option("--out", o.out, "output file (default stdout)");
  auto* sweep_cmd = app.add_subcommand("sweep", "one receiver over a grid");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--receiver", o.receiver, "receiver name")->required();
  sweep_cmd->add_option("--trials", o.trials, "Monte Carlo trials (e.g. 1e6)");
  sweep_cmd->add_option("--seed", o.seed, "Monte Carlo seed");
  auto* exp_cmd = app.add_subcommand("exponents", "exponent summary of an ensemble");
  add_common(exp_cmd);
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimate next to the exact value");
  add_common(sim_cmd);
  sim_cmd->add_option("--receiver", o.receiver, "swn-sim or st-sim")->required();
  sim_cmd->add_option("--trials", o.trials, "Monte Carlo trials (e.g. 1e6)");
  sim_cmd->add_option("--seed", o.seed, "Monte Carlo seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (fig3->parsed()) {
      emit(o, render_fig3(), out);
    } else if (fig4->parsed()) {
      emit(o, render_fig4(), out);
      err << kFig4Note << '\n';
    } else if (sweep_cmd->parsed()) {
      cmd_sweep(o, out);
    } else if (exp_cmd->parsed()) {
      cmd_exponents(o, out);
    } else if (sim_cmd->parsed()) {
      cmd_simulate(o, out);
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace nullrx::cli
