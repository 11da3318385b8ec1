#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "qstat/errors.hpp"

namespace qstat {

// Brent's method on [a, b]; f(a) and f(b) must differ in sign.
inline double brent_root(const std::function<double(double)>& f, double a,
                         double b, double rel_tol = 1e-12,
                         int max_iter = 200) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw BracketFailure("brent_root: no sign change in bracket");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 =
        2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
        0.5 * rel_tol * std::max(std::abs(b), 1.0);
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q),
                             std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  return b;
}

// Unique positive root of w^3 - a*w - b = 0 with a > 0, b >= 0, by the
// trigonometric/Cardano closed form plus one Newton polish step.
inline double positive_cubic_root(double a, double b) {
  if (b == 0.0) return std::sqrt(a);
  double w;
  const double p = -a, q = -b;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    w = std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s);
  } else {
    // three real roots; the largest one is the positive root we want
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double theta =
        std::acos(std::clamp(3.0 * q / (p * m), -1.0, 1.0)) / 3.0;
    w = m * std::cos(theta);
  }
  // Newton polish (residual is smooth; two steps reach ~1e-15 relative)
  for (int i = 0; i < 2; ++i) {
    const double f = w * w * w - a * w - b;
    const double df = 3.0 * w * w - a;
    if (df != 0.0) w -= f / df;
  }
  return w;
}

}  // namespace qstat
