#include <cmath>
#include <vector>

#include <doctest.h>

#include "qstat/errors.hpp"
#include "qstat/oracle.hpp"
#include "qstat/rotator.hpp"

using namespace qstat;

TEST_SUITE("oracle") {
  TEST_CASE("harmonic ladder is reproduced exactly") {
    const auto t = diagonalize_qao({0.0, 0.0}, 80, 1e-10);
    REQUIRE(t.converged_count >= 10);
    for (int n = 0; n < 10; ++n)
      CHECK(t.energies[n] == doctest::Approx(n + 0.5).epsilon(1e-10));
  }

  TEST_CASE("reference eigenvalues at lambda = 1") {
    const auto t = diagonalize_qao({0.0, 1.0});
    REQUIRE(t.converged_count >= 2);
    CHECK(t.energies[0] == doctest::Approx(0.803770651234).epsilon(1e-9));
    CHECK(t.energies[1] == doctest::Approx(2.737892268008).epsilon(1e-9));
    // spacings of the quartic well grow monotonically
    for (int n = 2; n < t.converged_count; ++n)
      CHECK(t.energies[n] - t.energies[n - 1] >
            t.energies[n - 1] - t.energies[n - 2]);
  }

  TEST_CASE("basis frequency does not matter") {
    const QaoParams p{0.0, 1.0};
    const double w0 = qao_omega_n(p, 0);
    const auto a = diagonalize_qao(p, 160, 1e-9, 1.0);
    const auto b = diagonalize_qao(p, 160, 1e-9, w0);
    const auto c = diagonalize_qao(p, 160, 1e-9, 2.0 * w0);
    const int k = std::min({a.converged_count, b.converged_count,
                            c.converged_count, 6});
    REQUIRE(k >= 4);
    for (int n = 0; n < k; ++n) {
      CHECK(a.energies[n] == doctest::Approx(b.energies[n]).epsilon(1e-8));
      CHECK(c.energies[n] == doctest::Approx(b.energies[n]).epsilon(1e-8));
    }
  }

  TEST_CASE("very strong coupling stays well conditioned") {
    const QaoParams p{0.0, 1e4};
    const auto t = diagonalize_qao(p);
    REQUIRE(t.converged_count >= 3);
    const double s = std::cbrt(1e4);
    // lambda^(1/3) scaling: E_0 / lambda^(1/3) is stable under doubling the
    // truncation and sits near (but a couple of percent below) b_0
    const auto big = diagonalize_qao(p, 240);
    CHECK(t.energies[0] / s ==
          doctest::Approx(big.energies[0] / s).epsilon(1e-6));
    CHECK(t.energies[0] / s ==
          doctest::Approx(qao_strong_coupling_bn(0).b_n).epsilon(0.025));
    CHECK(t.energies[1] / s ==
          doctest::Approx(qao_strong_coupling_bn(1).b_n).epsilon(0.025));
  }

  TEST_CASE("direct partition sums") {
    // harmonic, g = 1: Z = e^{-beta/2} / (1 - e^{-beta})
    auto e = [](int n) { return n + 0.5; };
    auto g = [](int) { return 1.0; };
    for (double beta : {0.05, 1.0, 8.0}) {
      const auto r = partition_direct(e, g, beta);
      const double zex = std::exp(-beta / 2.0) / (1.0 - std::exp(-beta));
      CHECK(r.z == doctest::Approx(zex).epsilon(1e-11));
      CHECK(r.free_energy ==
            doctest::Approx(harmonic_free_energy(1.0, beta)).epsilon(1e-11));
      CHECK(r.avg_energy ==
            doctest::Approx(0.5 / std::tanh(beta / 2.0)).epsilon(1e-10));
    }
    // a non-growing spectrum never clears the tail bound
    auto flat = [](int) { return 1.0; };
    CHECK_THROWS_AS(partition_direct(flat, g, 1.0), TailUnbounded);
  }

  TEST_CASE("finite level tables and their tail guard") {
    std::vector<double> lv(8);
    for (int n = 0; n < 8; ++n) lv[n] = n + 0.5;
    // cold enough: eight levels carry the whole sum
    const auto r = partition_from_levels(lv, 3.0, 1e-10);
    CHECK(r.z == doctest::Approx(std::exp(-1.5) / (1.0 - std::exp(-3.0)))
                     .epsilon(1e-9));
    // warm: the truncation error is detectable and must be reported
    CHECK_THROWS_AS(partition_from_levels(lv, 0.2, 1e-10),
                    TruncationInsufficient);
  }

  TEST_CASE("oscillator reference thermodynamics") {
    const QaoParams p{0.0, 1.0};
    const auto r = qao_partition_reference(p, 1.0);
    CHECK(r.levels_used > 2);
    // <E> = -d ln Z / d beta by central differences
    const double h = 1e-5;
    const double fd = -(std::log(qao_partition_reference(p, 1.0 + h).z) -
                        std::log(qao_partition_reference(p, 1.0 - h).z)) /
                      (2.0 * h);
    CHECK(r.avg_energy == doctest::Approx(fd).epsilon(1e-6));
    // harmonic limit
    const auto rh = qao_partition_reference({0.5, 0.0}, 2.0);
    CHECK(rh.free_energy ==
          doctest::Approx(harmonic_free_energy(std::sqrt(2.0), 2.0))
              .epsilon(1e-10));
  }

  TEST_CASE("free energies from the approximate spectra") {
    // lambda = 0: every route collapses to the harmonic result
    for (double beta : {0.5, 2.0}) {
      const double fex = harmonic_free_energy(1.0, beta);
      CHECK(qao_f_om0({0.0, 0.0}, beta) == doctest::Approx(fex).epsilon(1e-11));
      CHECK(qao_f_om2({0.0, 0.0}, beta) == doctest::Approx(fex).epsilon(1e-11));
      CHECK(qao_f01({0.0, 0.0}, beta) == doctest::Approx(fex).epsilon(1e-11));
    }
    // lambda = 1, beta = 1: the linearised correction improves on the
    // uncorrected spectrum
    const QaoParams p{0.0, 1.0};
    const double fref = qao_partition_reference(p, 1.0).free_energy;
    CHECK(std::abs(qao_f01(p, 1.0) - fref) <
          std::abs(qao_f_om0(p, 1.0) - fref));
  }

  TEST_CASE("asymptotic partition functions") {
    // weak coupling at lambda = 0 is the exact geometric sum
    const auto w = qao_asymptotic_z({0.0, 0.0}, 1.0, ZRegime::WeakCoupling);
    CHECK(w.in_regime);
    CHECK(w.value == doctest::Approx(std::exp(-0.5) / (1.0 - std::exp(-1.0)))
                         .epsilon(1e-12));
    // strong coupling at lambda = 100
    const QaoParams ps{0.0, 100.0};
    const auto s = qao_asymptotic_z(ps, 1.0, ZRegime::StrongCoupling);
    CHECK(s.in_regime);
    CHECK(std::abs(s.value - qao_partition_reference(ps, 1.0).z) /
              qao_partition_reference(ps, 1.0).z <
          0.05);
    // low temperature: the excited-state correction has died off
    const QaoParams p1{0.0, 1.0};
    const auto c = qao_asymptotic_z(p1, 20.0, ZRegime::LowT);
    CHECK(c.in_regime);
    CHECK(c.value ==
          doctest::Approx(1.0 + std::exp(-20.0 * qao_energy0(p1, 0)))
              .epsilon(1e-12));
    CHECK(c.value == doctest::Approx(1.0).epsilon(1e-6));
    // regime flags trip outside their range
    CHECK_FALSE(qao_asymptotic_z(p1, 0.5, ZRegime::LowT).in_regime);
    CHECK_FALSE(qao_asymptotic_z(ps, 1.0, ZRegime::WeakCoupling).in_regime);
  }

  TEST_CASE("rotator reference agrees with the direct sum") {
    for (double x : {0.05, 1.0, 10.0}) {
      const auto r = rotator_reference(x);
      CHECK(r.z == doctest::Approx(rotator_partition_direct(x)).epsilon(1e-12));
      CHECK(r.free_energy == doctest::Approx(-std::log(r.z) / x).epsilon(1e-12));
    }
  }
}
