#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "nullrx/bounds.hpp"
#include "nullrx/error.hpp"
#include "nullrx/exponents.hpp"
#include "nullrx/st.hpp"
#include "nullrx/swn.hpp"
#include "support/oracles.hpp"

using namespace nullrx;

namespace {

SweepCurve synthetic(double rate, double lo, double hi, int n) {
  SweepCurve c{"synthetic", ValueKind::Exact, {}};
  for (double x : make_grid(lo, hi, n)) c.points.push_back({x, 0.5 * std::exp(-rate * x)});
  return c;
}

std::string thrown_message(auto&& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("grids") {
  const auto g = make_grid(1.0, 3.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 1.0);
  CHECK(g.back() == 3.0);
  CHECK(g[2] == doctest::Approx(2.0));
  const auto lg = make_grid(1.0, 100.0, 3, true);
  CHECK(lg[1] == doctest::Approx(10.0));
  CHECK(lg.back() == 100.0);
  CHECK(make_grid(4.0, 4.0, 1) == std::vector<double>{4.0});
}

TEST_CASE("fit recovers a synthetic exponent") {
  const auto est = fit_epe(synthetic(4.0, 1.0, 6.0, 30));
  CHECK(est.slope == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(est.intercept == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(est.max_abs_residual <= 1e-9);
  CHECK_FALSE(est.pre_asymptotic());

  SweepCurve wiggly = synthetic(1.0, 5.0, 20.0, 16);
  for (std::size_t i = 0; i < wiggly.points.size(); i += 2) wiggly.points[i].p_e *= std::exp(2.0);
  CHECK(fit_epe(wiggly).pre_asymptotic());
}

TEST_CASE("fit window and probability range") {
  const auto c = synthetic(1.0, 1.0, 80.0, 80);
  FitOptions opts;
  const auto est = fit_epe(c, opts);
  // p in [1e-28, 1e-2]: x from ceil(ln 50) = 4 to floor(ln 5e27) = 63.
  CHECK(est.window.lo == 4.0);
  CHECK(est.window.hi == 63.0);
  CHECK(est.points == 60);
  opts.window = FitWindow{10.0, 20.0};
  const auto w = fit_epe(c, opts);
  CHECK(w.points == 11);
  CHECK(w.slope == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("too few points") {
  CHECK_THROWS_AS(fit_epe(synthetic(1.0, 5.0, 8.0, 4)), ValidationError);
  FitOptions narrow;
  narrow.window = FitWindow{5.0, 6.0};
  CHECK_THROWS_AS(fit_epe(synthetic(1.0, 5.0, 20.0, 16), narrow), ValidationError);
}

TEST_CASE("sweep argument checks") {
  const AnyEnsemble q = build_psk(4, 1.0);
  const ReceiverSpec srm{ReceiverKind::Srm};
  CHECK_THROWS_AS(sweep(srm, q, std::vector<double>{}), ValidationError);
  CHECK_THROWS_AS(sweep(srm, q, std::vector<double>{2.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(sweep(srm, q, std::vector<double>{1.0, 1.0}), ValidationError);

  const std::string msg = thrown_message([&] { sweep_axis({ReceiverKind::DdPpm}, q); });
  CHECK(msg.find("dd-ppm") != std::string::npos);
  CHECK_THROWS_AS(sweep_axis({ReceiverKind::HetQpsk}, AnyEnsemble(build_ppm(6, 1.0))), ValidationError);
  CHECK_THROWS_AS(sweep_axis({ReceiverKind::SwnExact, 0}, q), ValidationError);

  std::mt19937_64 rng(1);
  const AnyEnsemble pure = oracle::random_pure(rng, 3, 2);
  CHECK_THROWS_AS(sweep_axis({ReceiverKind::SwnExact, 4}, pure), ValidationError);
  CHECK(sweep_axis({ReceiverKind::StExact}, pure) == SweepAxis::Copies);
  CHECK(sweep_axis({ReceiverKind::SwnExact, 4}, q) == SweepAxis::Photons);
  CHECK_THROWS_AS(evaluate({ReceiverKind::StExact}, pure, 2.5), ValidationError);
}

TEST_CASE("receiver names") {
  for (auto name : {"swn-exact", "swn-bound", "swn-sim", "st-exact", "st-bound", "st-sim", "srm",
                    "het-union", "het-qpsk", "dd-ppm"})
    CHECK(receiver_kind_name(parse_receiver_kind(name)) == name);
  CHECK_THROWS_AS(parse_receiver_kind("homodyne"), ValidationError);
  CHECK(ReceiverSpec{ReceiverKind::SwnBound, 12}.label() == "swn_L12");
  CHECK(ReceiverSpec{ReceiverKind::SwnBound, 12}.value_kind() == ValueKind::Bound);
  CHECK(ReceiverSpec{ReceiverKind::StSim}.value_kind() == ValueKind::Sim);
  CHECK(ReceiverSpec{ReceiverKind::HetQpsk}.label() == "heterodyne");
  CHECK(ReceiverSpec{ReceiverKind::DdPpm}.label() == "direct_detection");
}

TEST_CASE("sweeps on the photon axis") {
  const AnyEnsemble q = build_psk(4, 1.0);
  const auto grid = make_grid(5.0, 25.0, 21);
  const auto srm = sweep({ReceiverKind::Srm}, q, grid);
  REQUIRE(srm.curve.points.size() == 21);
  CHECK(srm.dropped.empty());
  CHECK(srm.curve.points[0].p_e == doctest::Approx(2.270275e-05).epsilon(1e-6));
  for (std::size_t i = 1; i < 21; ++i) CHECK(srm.curve.points[i].p_e < srm.curve.points[i - 1].p_e);
  CHECK(fit_epe(srm.curve).slope == doctest::Approx(2.0).epsilon(0.05));

  const auto het = sweep({ReceiverKind::HetQpsk}, q, make_grid(10.0, 40.0, 31));
  CHECK(fit_epe(het.curve).slope == doctest::Approx(0.5).epsilon(0.05));

  const AnyEnsemble ppm = build_ppm(6, 1.0);
  const auto dd = sweep({ReceiverKind::DdPpm}, ppm, make_grid(0.5, 30.0, 60));
  CHECK(dd.curve.label == "direct_detection");
  CHECK(dd.curve.points[0].p_e == doctest::Approx(direct_detection_ppm_error(6, 0.5)).epsilon(1e-14));
  CHECK(fit_epe(dd.curve).slope == doctest::Approx(1.0).epsilon(1e-9));

  // The floor drops points instead of fitting log(0).
  const auto deep = sweep({ReceiverKind::Srm}, q, make_grid(10.0, 60.0, 11));
  CHECK_FALSE(deep.dropped.empty());
  for (const auto& pt : deep.curve.points) CHECK(pt.p_e >= 1e-30);
}

TEST_CASE("nulling exponents grow with the slice count") {
  const AnyEnsemble q = build_psk(4, 1.0);
  const auto grid = make_grid(5.0, 25.0, 41);
  const double kappa = 2.0;
  double prev = 0.0;
  for (int L : {4, 8, 12, 24, 48}) {
    const ReceiverSpec spec{ReceiverKind::SwnExact, L};
    const double slope = fit_epe(sweep(spec, q, grid).curve).slope;
    CHECK(slope > prev);
    CHECK(slope <= kappa + 1e-3);
    CHECK(slope >= swn_exponent_bound(std::get<CoherentEnsemble>(q), L) - 0.05);
    prev = slope;
  }
}

TEST_CASE("sequential testing exponent") {
  std::mt19937_64 rng(21);
  Eigen::VectorXcd a(2), b(2);
  a << 1.0, 0.0;
  b << std::sqrt(0.3), std::sqrt(0.7);
  const AnyEnsemble pair = PureStateEnsemble({a, b}, {0.5, 0.5});
  const auto curve = sweep({ReceiverKind::StExact}, pair, make_grid(10.0, 50.0, 41)).curve;
  CHECK(fit_epe(curve).slope == doctest::Approx(-std::log(0.3)).epsilon(1e-9));

  const auto ens = oracle::random_pure(rng, 3, 3);
  const double xi = qce(ens).value();
  FitOptions deep;
  deep.min_p = 1e-300;
  deep.window = FitWindow{50.0, 200.0};
  const auto st = sweep({ReceiverKind::StExact}, AnyEnsemble(ens), make_grid(50.0, 200.0, 151),
                        {.floor = 1e-300});
  CHECK(fit_epe(st.curve, deep).slope == doctest::Approx(xi).epsilon(0.05));
}

TEST_CASE("simulated sweeps replay from the seed") {
  const AnyEnsemble q = build_psk(4, 1.0);
  const ReceiverSpec spec{ReceiverKind::SwnSim, 8, 50'000, 11};
  const auto grid = make_grid(0.5, 3.0, 6);
  const auto a = sweep(spec, q, grid);
  const auto b = sweep(spec, q, grid);
  REQUIRE(a.curve.points.size() == b.curve.points.size());
  for (std::size_t i = 0; i < a.curve.points.size(); ++i) CHECK(a.curve.points[i].p_e == b.curve.points[i].p_e);
  CHECK(a.curve.kind == ValueKind::Sim);
}
