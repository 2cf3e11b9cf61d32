#include <doctest.h>

#include <cmath>
#include <random>

#include "nullrx/bounds.hpp"
#include "nullrx/error.hpp"
#include "nullrx/swn.hpp"
#include "support/oracles.hpp"

using namespace nullrx;

TEST_CASE("Q function") {
  CHECK(q_function(0.0) == 0.5);
  CHECK(q_function(1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-14));
  CHECK(q_function(-1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
  CHECK(q_function(10.0) == doctest::Approx(7.619853024160527e-24).epsilon(1e-12));
  CHECK(q_function(30.0) == doctest::Approx(4.906713927148187e-198).epsilon(1e-12));
  CHECK(q_function(40.0) == 0.0);
}

TEST_CASE("square root of a Gram matrix") {
  std::mt19937_64 rng(3);
  for (int M = 2; M <= 16; M += 2) {
    const auto ens = oracle::random_pure(rng, M, M / 2 + 1);
    const auto G = weighted_gram(ens);
    CHECK(std::abs(G.entries.trace() - 1.0) <= 1e-12);
    const auto S = psd_sqrt(G.entries);
    CHECK((S * S - G.entries).norm() <= 1e-10);
    CHECK((S - S.adjoint()).norm() <= 1e-12);
  }
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(2, 2);
  bad(1, 1) = -0.1;
  CHECK_THROWS_AS(psd_sqrt(bad), ValidationError);
}

TEST_CASE("coherent Gram matrix matches the factored pure states") {
  std::mt19937_64 rng(5);
  const auto ens = oracle::random_coherent(rng, 5, 3, 2.0);
  const auto direct = weighted_gram(ens);
  const auto factored = weighted_gram(coherent_as_pure(ens));
  CHECK((direct.entries - factored.entries).norm() <= 1e-12);
  CHECK(srm_error(ens) == doctest::Approx(srm_error(coherent_as_pure(ens))).epsilon(1e-9));
}

TEST_CASE("binary SRM equals the Helstrom bound for equal priors") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    auto ens = oracle::random_pure(rng, 2, 2 + trial % 3);
    const PureStateEnsemble eq({ens.vector(0), ens.vector(1)}, {0.5, 0.5});
    const double F = oracle::fidelity(eq.vector(0), eq.vector(1));
    CHECK(std::abs(srm_error(eq) - helstrom_binary(0.5, 0.5, F)) <= 1e-10);
  }
  // Copies: F^n.
  std::mt19937_64 rng2(18);
  const auto ens = oracle::random_pure(rng2, 2, 2);
  const PureStateEnsemble eq({ens.vector(0), ens.vector(1)}, {0.5, 0.5});
  const double F = oracle::fidelity(eq.vector(0), eq.vector(1));
  for (int n : {1, 3, 10, 40})
    CHECK(srm_error(eq, n) == doctest::Approx(helstrom_binary(0.5, 0.5, std::pow(F, n))).epsilon(1e-9));
}

TEST_CASE("SRM against extended-precision references") {
  for (double N : {0.5, 1.0, 3.0, 7.0, 12.0, 20.0, 25.0}) {
    const double ref = oracle::psk_srm_error(4, N);
    CHECK(srm_error(build_psk(4, N)) == doctest::Approx(ref).epsilon(1e-6));
    const double ref8 = oracle::psk_srm_error(8, N);
    CHECK(srm_error(build_psk(8, N)) == doctest::Approx(ref8).epsilon(1e-6));
  }
  for (double N : {0.5, 2.0, 10.0, 20.0, 30.0}) {
    const double ref = oracle::equal_overlap_srm_error(6, std::exp(-N));
    CHECK(srm_error(build_ppm(6, N)) == doctest::Approx(ref).epsilon(1e-6));
  }
  CHECK(srm_error(build_psk(4, 1.0)) == doctest::Approx(9.242142e-02).epsilon(1e-6));
  // Deep tail, 400-digit values.
  CHECK(srm_error(build_ppm(6, 60.0)) == doctest::Approx(9.5845601e-53).epsilon(1e-6));
  CHECK(srm_error(build_ppm(6, 90.0)) == doctest::Approx(8.3927304e-79).epsilon(1e-6));
}

TEST_CASE("orthogonal states are perfectly distinguishable") {
  std::vector<Eigen::VectorXcd> vs;
  for (int m = 0; m < 4; ++m) vs.push_back(Eigen::VectorXcd::Unit(4, m));
  CHECK(srm_error(PureStateEnsemble(vs, {0.25, 0.25, 0.25, 0.25})) <= 1e-15);
}

TEST_CASE("binary Helstrom") {
  CHECK(helstrom_binary(0.3, 0.7, 0.0) == 0.0);
  CHECK(helstrom_binary(0.3, 0.7, 1.0) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(helstrom_binary(0.5, 0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  // BPSK with N photons: F = exp(-4N).
  const double N = 2.0;
  const double F = std::exp(-4 * N);
  CHECK(helstrom_binary(0.5, 0.5, F) == doctest::Approx(0.5 * (1 - std::sqrt(1 - F))).epsilon(1e-12));
  CHECK(helstrom_binary(0.5, 0.5, 1e-300) == doctest::Approx(0.25e-300).epsilon(1e-12));
  double prev = 0.0;
  for (double f = 0.0; f <= 1.0; f += 0.01) {
    const double p = helstrom_binary(0.4, 0.6, f);
    CHECK(p >= prev);
    prev = p;
  }
  CHECK_THROWS_AS(helstrom_binary(0.5, 0.5, 1.5), ValidationError);
  CHECK_THROWS_AS(helstrom_binary(0.7, 0.5, 0.5), ValidationError);
}

TEST_CASE("exponent ratios") {
  const auto q = build_psk(4, 3.0);
  CHECK(helstrom_epe(q) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(heterodyne_epe(q) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(helstrom_epe(build_ppm(6, 2.0)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(helstrom_epe(q) / heterodyne_epe(q) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("heterodyne") {
  SUBCASE("union bound, binary case is a single Q term") {
    const auto b = build_psk(2, 2.0);
    CHECK(heterodyne_union_bound(b) == doctest::Approx(q_function(std::sqrt(8.0 / 2.0))).epsilon(1e-14));
  }
  SUBCASE("union bound with coincident states") {
    Amplitudes a(1), c(1);
    a(0) = 1.0;
    c(0) = -1.0;
    const CoherentEnsemble dup({a, a, c}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
    // The coincident pair alone contributes 2 * (1/3) * Q(0).
    CHECK(heterodyne_union_bound(dup) >= 1.0 / 3.0);
  }
  SUBCASE("QPSK exact") {
    CHECK(heterodyne_qpsk_exact(0.0) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(heterodyne_qpsk_exact(9.0) == doctest::Approx(2.697974e-3).epsilon(1e-6));
    for (double N : {0.5, 2.0, 9.0, 16.0})
      CHECK(heterodyne_qpsk_exact(N) == doctest::Approx(oracle::qpsk_heterodyne_quadrature(N)).epsilon(1e-7));
    CHECK(heterodyne_qpsk_exact(1.0) == doctest::Approx(2.921390e-01).epsilon(1e-6));
    CHECK(heterodyne_qpsk_exact(25.0) == doctest::Approx(5.733031e-07).epsilon(1e-6));
  }
}

TEST_CASE("direct detection of PPM") {
  CHECK(direct_detection_ppm_error(6, 0.0) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(direct_detection_ppm_error(6, std::log(6.0)) == doctest::Approx(5.0 / 36.0).epsilon(1e-14));
  CHECK(std::log(direct_detection_ppm_error(6, 10.0) / direct_detection_ppm_error(6, 11.0)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // Poisson simulation: the photon lands in the right slot or nothing is
  // seen, in which case the receiver guesses uniformly.
  std::mt19937_64 rng(6);
  const double N = 1.2;
  std::poisson_distribution<int> photons(N);
  std::uniform_int_distribution<int> guess(0, 5);
  const int trials = 400'000;
  int errors = 0;
  for (int t = 0; t < trials; ++t)
    if (photons(rng) == 0 && guess(rng) != 0) ++errors;
  const double p = static_cast<double>(errors) / trials;
  const double ci = 1.96 * std::sqrt(p * (1 - p) / trials);
  CHECK(std::abs(p - direct_detection_ppm_error(6, N)) <= 3 * ci);
}

TEST_CASE("QPSK receiver ordering") {
  for (int i = 1; i <= 20; ++i) {
    const double N = 1.25 * i;
    const auto q = build_psk(4, N);
    const double srm = srm_error(q);
    const double het = heterodyne_qpsk_exact(N);
    CHECK(srm <= het);
    for (int L : {4, 8, 12}) {
      const double swn = swn_exact_error(q, L).average;
      CHECK(srm <= swn);
      CHECK(swn <= swn_upper_bound(q, L));
    }
  }
  // Per-photon exponents from two widely spaced points.
  const double het_rate =
      std::log(heterodyne_qpsk_exact(20.0) / heterodyne_qpsk_exact(40.0)) / 20.0;
  const double srm_rate = std::log(srm_error(build_psk(4, 5.0)) / srm_error(build_psk(4, 25.0))) / 20.0;
  CHECK(het_rate / srm_rate >= 0.23);
  CHECK(het_rate / srm_rate <= 0.27);
}
