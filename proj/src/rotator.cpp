#include "qstat/rotator.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "qstat/cumulant.hpp"
#include "qstat/errors.hpp"
#include "qstat/roots.hpp"
#include "qstat/series.hpp"

namespace qstat {

double rotator_partition_direct(double x, double tol) {
  if (!(x > 1e-8))
    throw SlowConvergence("rotator_partition_direct: x too small (<= 1e-8)");
  const auto r = sum_with_tail_bound(
      [x](std::int64_t n) {
        return (2.0 * n + 1.0) * std::exp(-x * n * (n + 1.0));
      },
      tol);
  return r.sum;
}

RotatorMoments rotator_trial_moments(double q) {
  RotatorMoments m;
  const double omq = 1.0 - q, opq = 1.0 + q;
  m.norm = omq * omq / opq;
  m.nbar = q * (3.0 + q) / (omq * opq);
  m.n2bar = q * (3.0 + 8.0 * q + q * q) / (opq * omq * omq);
  return m;
}

double rotator_x_of_q(double q) {
  const double opq = 1.0 + q;
  return -(3.0 + 2.0 * q + 3.0 * q * q) * (1.0 - q) * std::log(q) /
         (6.0 * opq * opq * opq);
}

double rotator_phi(double x, double q) {
  const double omq = 1.0 - q, opq = 1.0 + q;
  return -6.0 * x * q / (omq * omq) -
         (3.0 * q + q * q) / (omq * opq) * std::log(q) -
         std::log(omq * omq / opq);
}

RotatorZ0 rotator_z0(double x) {
  if (!(x > 0.0))
    throw std::invalid_argument("rotator_z0: x must be positive");
  // x(q) is strictly decreasing on (0, 1) -- assert once on a dense grid,
  // because the inversion below silently assumes it.
  static const bool monotone = [] {
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 10000; ++i) {
      const double xv = rotator_x_of_q(i / 10001.0);
      if (!(xv < prev)) return false;
      prev = xv;
    }
    return true;
  }();
  if (!monotone)
    throw BracketFailure("rotator_z0: x(q) is not monotone on the test grid");
  // Bisect in t = ln q, where the residual stays well-scaled even for the
  // deep-cold regime q ~ exp(-2x).
  auto resid = [x](double t) { return rotator_x_of_q(std::exp(t)) - x; };
  double t_hi = -1e-12;
  double t_lo = -2.0 * x - 4.0;
  while (resid(t_lo) <= 0.0) t_lo *= 2.0;
  const double t = brent_root(resid, t_lo, t_hi, 1e-14);
  RotatorZ0 out;
  out.q_star = std::exp(t);
  out.z0 = std::exp(rotator_phi(x, out.q_star));
  return out;
}

double rotator_phi1(double q) {
  const double lq = std::log(q);
  const double omq = 1.0 - q, opq = 1.0 + q;
  const double opq6 = std::pow(opq, 6);
  const double closed =
      q * q / 6.0 *
      (15.0 + q * (4.0 + q * (26.0 + q * (4.0 + 15.0 * q)))) /
      (omq * omq * opq6) * lq * lq;
  // The closed form is only valid together with the stationarity condition;
  // cross-check it against the generic second cumulant and prefer the
  // latter if they drift apart.
  const double generic = rotator_phi1_generic(rotator_x_of_q(q), q);
  if (std::abs(closed - generic) >
      1e-8 * std::max(1.0, std::abs(generic))) {
    std::fprintf(stderr,
                 "rotator_phi1: closed form %.17g vs moment evaluation %.17g "
                 "at q = %.17g; using moments\n",
                 closed, generic, q);
    return generic;
  }
  return closed;
}

double rotator_z1_factor(double q) { return std::exp(rotator_phi1(q)); }

double rotator_phi1_generic(double x, double q) {
  const auto m = spectral_moments([](int n) { return n * (n + 1.0); },
                                  [](int n) { return 2.0 * n + 1.0; }, q);
  const double lq = std::log(q);
  const double var_e = m.e2 - m.e1 * m.e1;
  const double cov_en = m.en - m.e1 * m.n1;
  const double var_n = m.n2 - m.n1 * m.n1;
  return 0.5 * (x * x * var_e + 2.0 * x * lq * cov_en + lq * lq * var_n);
}

}  // namespace qstat
