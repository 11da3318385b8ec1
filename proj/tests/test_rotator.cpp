#include <cmath>
#include <random>

#include <doctest.h>

#include "qstat/errors.hpp"
#include "qstat/rotator.hpp"

using namespace qstat;

TEST_SUITE("rotator") {
  TEST_CASE("direct partition sum") {
    CHECK(rotator_partition_direct(1.0) ==
          doctest::Approx(1.4184426386).epsilon(1e-9));
    CHECK(rotator_partition_direct(50.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
    // high-temperature expansion 1/x + 1/3 + x/12
    CHECK(rotator_partition_direct(0.1) ==
          doctest::Approx(10.0 + 1.0 / 3.0 + 0.1 / 12.0).epsilon(1e-3));
    CHECK_THROWS_AS(rotator_partition_direct(1e-9), SlowConvergence);
  }

  TEST_CASE("temperature-parameter map x(q)") {
    CHECK(rotator_x_of_q(std::exp(-2.0)) ==
          doctest::Approx(0.654977487880894).epsilon(1e-12));
    // q -> 1: x ~ (1-q)^2/6
    const double eps = 1e-4;
    CHECK(rotator_x_of_q(1.0 - eps) ==
          doctest::Approx(eps * eps / 6.0).epsilon(1e-3));
    // q -> 0: x ~ -ln(q)/2
    const double q0 = 1e-8;
    CHECK(rotator_x_of_q(q0) ==
          doctest::Approx(-std::log(q0) / 2.0).epsilon(1e-6));
  }

  TEST_CASE("trial moments and the contraction identity") {
    const auto m = rotator_trial_moments(0.5);
    CHECK(m.norm == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(m.nbar == doctest::Approx(7.0 / 3.0).epsilon(1e-14));
    CHECK(m.n2bar == doctest::Approx(29.0 / 3.0).epsilon(1e-14));

    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> dist(1e-4, 1.0 - 1e-4);
    for (int i = 0; i < 1000; ++i) {
      const double q = dist(rng);
      const auto t = rotator_trial_moments(q);
      const double lhs = t.n2bar + t.nbar;
      const double rhs = 6.0 * q / ((1.0 - q) * (1.0 - q));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }

  TEST_CASE("zeroth-order estimate") {
    // large x: Z0 ~ 1 + 3 exp(-2x)
    CHECK(rotator_z0(5.0).z0 ==
          doctest::Approx(1.0 + 3.0 * std::exp(-10.0)).epsilon(5e-3));
    // the deep-cold regime needs q far below any fixed bracket floor
    const auto cold = rotator_z0(50.0);
    CHECK(cold.q_star < 1e-40);
    CHECK(cold.z0 == doctest::Approx(1.0).epsilon(1e-6));
    // moderate x: within the uniform 10% band
    const double zx = rotator_partition_direct(1.0);
    CHECK(std::abs(rotator_z0(1.0).z0 - zx) / zx < 0.1);
    // estimate decreases with x, like the exact sum
    double prev = 1e300;
    for (double x : {0.05, 0.2, 1.0, 4.0}) {
      const double z = rotator_z0(x).z0;
      CHECK(z < prev);
      prev = z;
    }
  }

  TEST_CASE("stationarity of phi along the parametric solution") {
    for (double q : {0.1, 0.5, 0.9}) {
      const double x = rotator_x_of_q(q);
      const double h = 1e-6 * q;
      const double d =
          (rotator_phi(x, q + h) - rotator_phi(x, q - h)) / (2.0 * h);
      CHECK(std::abs(d) < 1e-8);
    }
  }

  TEST_CASE("first correction") {
    CHECK(rotator_phi1(0.5) ==
          doctest::Approx(0.17530933018).epsilon(1e-9));
    CHECK(rotator_phi1(0.5) ==
          doctest::Approx(rotator_phi1_generic(rotator_x_of_q(0.5), 0.5))
              .epsilon(1e-10));
    CHECK(rotator_z1_factor(0.001) == doctest::Approx(1.0).epsilon(1e-4));
    // the correction moves the estimate toward the exact sum at high T
    for (double x : {0.01, 0.05, 0.2, 0.5}) {
      const auto z = rotator_z0(x);
      const double zex = rotator_partition_direct(x);
      const double with = z.z0 * rotator_z1_factor(z.q_star);
      CHECK(std::abs(with - zex) < std::abs(z.z0 - zex));
    }
  }
}
