#include <cmath>

#include <doctest.h>

#include "qstat/om_core.hpp"
#include "qstat/qao.hpp"

using namespace qstat;

namespace {

// Diagonal-only provider: the iteration must terminate at H_nn.
class DiagonalProvider final : public MatrixElementProvider {
 public:
  double evaluate(int n, int k, double) const override {
    return n == k ? n + 0.5 : 0.0;
  }
  int band() const override { return 2; }
  int parity_step() const override { return 2; }
};

// Two levels of a nearly-degenerate pair.
class DegenerateProvider final : public MatrixElementProvider {
 public:
  double evaluate(int n, int k, double) const override {
    if (n == k) return n == 0 ? 1.0 : 1.0 + 1e-12;
    return 0.1;
  }
  int band() const override { return 2; }
  int parity_step() const override { return 2; }
};

double harmonic_pt2_exact(double mu, int n) {
  // (n + 1/2)(1 + mu - mu^2/2): the mu^2 Taylor of (n+1/2) sqrt(1+2mu).
  return (n + 0.5) * (1.0 + mu - 0.5 * mu * mu);
}

}  // namespace

TEST_SUITE("om-core") {
  TEST_CASE("diagonal hamiltonian converges to the diagonal") {
    DiagonalProvider prov;
    const auto st = om_iterate(prov, 1, 1.0, 10, 20);
    CHECK(st.converged);
    CHECK(st.value() == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(om_second_order(prov, 1, 1.0, 20) ==
          doctest::Approx(1.5).epsilon(1e-14));
  }

  TEST_CASE("second iteration reproduces the closed perturbative sum") {
    QaoProvider prov({0.0, 1.0});
    const double w = 2.0;
    double expect = prov.evaluate(0, 0, w);
    for (int m : {2, 4}) {
      const double h = prov.evaluate(0, m, w);
      expect -= h * h / (prov.evaluate(m, m, w) - prov.evaluate(0, 0, w));
    }
    CHECK(om_second_order(prov, 0, w, 40) ==
          doctest::Approx(expect).epsilon(1e-14));
  }

  TEST_CASE("iteration sequence at the textbook point") {
    QaoProvider prov({0.0, 1.0});
    // The plain iteration is stable only for modest truncations (the
    // coupling-to-gap ratio grows with the level index); k = 14 is the
    // largest stable choice here.
    const auto st = om_iterate(prov, 0, 2.0, 400, 14);
    REQUIRE(st.energies.size() >= 1);
    CHECK(st.energies[0] == doctest::Approx(0.8050).epsilon(1e-12));
    CHECK(st.converged);
    // fixed point = lowest eigenvalue of the truncated matrix, which sits
    // 6e-8 above the untruncated ground level 0.803770651234
    CHECK(st.value() == doctest::Approx(0.803770713707).epsilon(1e-9));
    CHECK(std::abs(st.value() - 0.803770651234) < 1e-7);

    // beyond the stable truncation the sequence wanders and must not be
    // reported as converged
    bool settled = false;
    try {
      settled = om_iterate(prov, 0, 2.0, 120, 48).converged;
    } catch (const NonConvergence&) {
    }
    CHECK_FALSE(settled);
  }

  TEST_CASE("near-degenerate diagonal is rejected") {
    DegenerateProvider prov;
    CHECK_THROWS_AS(om_iterate(prov, 0, 1.0, 10, 6), DegenerateDiagonal);
    CHECK_THROWS_AS(om_second_order(prov, 0, 1.0, 6), DegenerateDiagonal);
  }

  TEST_CASE("optimize_omega finds the stationary basis frequency") {
    QaoProvider prov({0.0, 1.0});
    // level 0: the cubic w^3 - w - 6 = 0 has the root w = 2 exactly
    const double w = optimize_omega(prov, 0, 0.5, 10.0);
    CHECK(w == doctest::Approx(2.0).epsilon(1e-10));
    CHECK_THROWS_AS(optimize_omega(prov, 0, 3.0, 10.0), NoStationaryPoint);
  }

  TEST_CASE("rayleigh-schrodinger second order on the soluble model") {
    // H = p^2/2 + x^2/2 + mu x^2, exact E_n = (n+1/2) sqrt(1+2mu)
    const double mu = 0.05;
    auto e0 = [](int n) { return n + 0.5; };
    auto v = [mu](int a, int b) {
      if (a > b) std::swap(a, b);
      if (a == b) return mu * (a + 0.5);
      if (b == a + 2) return mu * std::sqrt((a + 1.0) * (a + 2.0)) / 2.0;
      return 0.0;
    };
    for (int n : {0, 1, 3}) {
      CHECK(rs_pt2_energy(e0, v, 2, 2, n) ==
            doctest::Approx(harmonic_pt2_exact(mu, n)).epsilon(1e-12));
    }
  }

  TEST_CASE("thermodynamic perturbation theory matches the exact expansion") {
    auto e0 = [](int n) { return n + 0.5; };
    auto v = [](int a, int b) {
      if (a > b) std::swap(a, b);
      if (a == b) return a + 0.5;
      if (b == a + 2) return std::sqrt((a + 1.0) * (a + 2.0)) / 2.0;
      return 0.0;
    };
    const double mu = 0.1, beta = 2.0;
    const double f = thermo_cpt2_free_energy(e0, v, 2, 2, mu, beta, 400);
    // exact F(mu) = ln[2 sinh(beta sqrt(1+2mu)/2)]/beta expanded to mu^2
    const double sh = std::sinh(beta / 2.0);
    const double taylor =
        std::log(2.0 * sh) / beta + mu / (2.0 * std::tanh(beta / 2.0)) +
        0.5 * mu * mu *
            (-beta / (4.0 * sh * sh) - 1.0 / (2.0 * std::tanh(beta / 2.0)));
    CHECK(f == doctest::Approx(taylor).epsilon(1e-6));

    CHECK_THROWS_AS(thermo_cpt2_free_energy(e0, v, 2, 2, mu, 0.05, 50),
                    TruncationInsufficient);
  }
}
