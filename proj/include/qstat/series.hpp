#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "qstat/errors.hpp"

namespace qstat {

struct SeriesResult {
  double sum = 0.0;
  std::int64_t terms = 0;
  double tail_bound = 0.0;
};

// Sums term(0) + term(1) + ... until the geometric tail bound drops below
// tol * |partial sum|.  The bound treats the last observed ratio
// r = t_{n}/t_{n-1} as an upper bound on all subsequent ratios, which is
// valid for eventually log-convex decaying terms (Boltzmann weights over
// spectra with non-decreasing gaps, polynomial-times-geometric series).
template <class TermFn>
SeriesResult sum_with_tail_bound(TermFn&& term, double tol,
                                 std::int64_t max_terms = 20'000'000,
                                 std::int64_t min_terms = 4) {
  SeriesResult r;
  double prev = 0.0;
  for (std::int64_t n = 0; n < max_terms; ++n) {
    const double t = term(n);
    r.sum += t;
    ++r.terms;
    const double at = std::abs(t);
    if (n >= min_terms && at > 0.0 && std::abs(prev) > 0.0) {
      const double ratio = at / std::abs(prev);
      if (ratio < 1.0) {
        r.tail_bound = at * ratio / (1.0 - ratio);
        if (r.tail_bound <= tol * std::abs(r.sum)) return r;
      }
    } else if (n >= min_terms && at == 0.0 && std::abs(prev) == 0.0) {
      r.tail_bound = 0.0;
      return r;  // two consecutive exact zeros: series terminated
    }
    prev = t;
  }
  throw SeriesOverflow("series did not converge within term budget");
}

}  // namespace qstat
