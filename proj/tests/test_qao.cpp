#include <cmath>

#include <doctest.h>

#include "qstat/om_core.hpp"
#include "qstat/qao.hpp"

using namespace qstat;

TEST_SUITE("qao") {
  TEST_CASE("stationary frequency solves its cubic") {
    CHECK(qao_omega_n({0.0, 1.0}, 0) == doctest::Approx(2.0).epsilon(1e-13));
    for (double lam : {0.01, 0.5, 3.0, 500.0}) {
      for (double mu : {0.0, 0.4}) {
        const QaoParams p{mu, lam};
        for (int n : {0, 1, 4, 9}) {
          const double w = qao_omega_n(p, n);
          const double resid =
              w * w * w - w * (1.0 + 2.0 * mu) -
              6.0 * lam * (2.0 * n * n + 2.0 * n + 1.0) / (2.0 * n + 1.0);
          CHECK(std::abs(resid) < 1e-10 * std::max(1.0, w * w * w));
        }
      }
    }
    // lambda = 0: harmonic frequency
    CHECK(qao_omega_n({0.5, 0.0}, 3) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  }

  TEST_CASE("textbook zeroth-order values") {
    CHECK(qao_energy0({0.0, 1.0}, 0) ==
          doctest::Approx(0.8125).epsilon(1e-14));
    // lambda = 0 reduces to the harmonic ladder
    for (int n : {0, 2, 7})
      CHECK(qao_energy0({0.0, 0.0}, n) ==
            doctest::Approx(n + 0.5).epsilon(1e-14));
  }

  TEST_CASE("closed corrections at the textbook point") {
    const auto c = qao_corrections({0.0, 1.0}, 0, 2.0);
    CHECK(c.de2 == doctest::Approx(-0.0075).epsilon(1e-12));
    CHECK(c.de3 == doctest::Approx(-1.83711730709e-4).epsilon(1e-9));
    CHECK(0.8125 + c.de2 == doctest::Approx(0.8050).epsilon(1e-12));
    CHECK(0.8125 + c.de2 + c.de3 ==
          doctest::Approx(0.8048162883).epsilon(1e-9));
  }

  TEST_CASE("closed second correction vs the banded sum") {
    for (double lam : {0.5, 2.0}) {
      const QaoParams p{0.0, lam};
      QaoProvider prov(p);
      for (int n = 0; n <= 6; ++n) {
        const double w = qao_omega_n(p, n);
        const double engine =
            om_second_order(prov, n, w, n + 40) - qao_diagonal(p, n, w);
        const double closed = qao_corrections(p, n, w).de2;
        if (n < 2) {
          // no downward couplings: the closed form is the full sum
          CHECK(engine == doctest::Approx(closed).epsilon(1e-12));
        } else {
          // the closed form keeps the upward couplings only; adding the
          // downward terms must reproduce the full sum exactly
          double down = 0.0;
          for (int m : {n - 2, n - 4}) {
            if (m < 0) continue;
            const double h = prov.evaluate(n, m, w);
            down -= h * h /
                    (prov.evaluate(m, m, w) - prov.evaluate(n, n, w));
          }
          CHECK(engine ==
                doctest::Approx(closed + down).epsilon(1e-12));
          CHECK(std::abs(down) > 1e-6);  // genuinely present for n >= 2
        }
      }
    }
  }

  TEST_CASE("strong-coupling coefficients") {
    double prev = 0.0;
    for (int n = 0; n <= 10; ++n) {
      const double b = qao_strong_coupling_bn(n).b_n;
      CHECK(b > prev);
      prev = b;
    }
    // scaling collapse: E_n^(0) / lambda^(1/3) approaches b_n
    const QaoParams p{0.0, 1e6};
    for (int n : {0, 2, 5}) {
      CHECK(qao_energy0(p, n) / 1e2 ==
            doctest::Approx(qao_strong_coupling_bn(n).b_n).epsilon(1e-4));
    }
  }

  TEST_CASE("provider is symmetric, banded and parity-preserving") {
    QaoProvider prov({0.3, 2.0});
    const double w = 1.7;
    for (int n = 0; n < 8; ++n) {
      for (int k = 0; k < 8; ++k) {
        CHECK(prov.evaluate(n, k, w) == prov.evaluate(k, n, w));
        if (std::abs(n - k) > 4 || (n - k) % 2 != 0)
          CHECK(prov.evaluate(n, k, w) == 0.0);
      }
    }
  }

  TEST_CASE("analytic diagonal derivative matches finite differences") {
    QaoProvider prov({0.2, 3.0});
    for (int n : {0, 3}) {
      for (double w : {0.8, 2.5}) {
        const double h = 1e-6;
        const double fd =
            (prov.evaluate(n, n, w + h) - prov.evaluate(n, n, w - h)) /
            (2.0 * h);
        CHECK(*prov.diagonal_derivative(n, w) ==
              doctest::Approx(fd).epsilon(1e-7));
      }
    }
  }

  TEST_CASE("per-level solution is stationary in omega") {
    const QaoParams p{0.0, 5.0};
    QaoProvider prov(p);
    for (int n : {0, 1, 6}) {
      const auto lv = qao_om_level(p, n);
      CHECK(std::abs(*prov.diagonal_derivative(n, lv.omega)) < 1e-9);
      CHECK(lv.e2() == lv.e0 + lv.de2);
      CHECK(lv.e3() == lv.e0 + lv.de2 + lv.de3);
    }
  }

  TEST_CASE("fixed-basis perturbation series") {
    // lambda = 0.1: E = 1/2 + 3 lambda / 4 - (0.0225 + 0.00375) at order 2
    CHECK(qao_rs_pt2({0.0, 0.1}, 0) ==
          doctest::Approx(0.54875).epsilon(1e-12));
    // harmonic limit is exact
    CHECK(qao_rs_pt2({0.0, 0.0}, 2) == doctest::Approx(2.5).epsilon(1e-14));
  }

  TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(qao_omega_n({-0.6, 1.0}, 0), std::invalid_argument);
    CHECK_THROWS_AS(qao_omega_n({0.0, -1.0}, 0), std::invalid_argument);
  }
}
