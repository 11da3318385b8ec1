#include "qstat/cumulant.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "qstat/roots.hpp"
#include "qstat/series.hpp"

namespace qstat {

// Geometric ensemble p_n = (1-q) q^n; factorial-moment closed forms.
TrialMoments trial_moments_uniform(double q) {
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("trial_moments_uniform: q outside (0, 1)");
  const double omq = 1.0 - q;
  TrialMoments m;
  m.norm = omq;
  m.n1 = q / omq;
  m.n2 = q * (1.0 + q) / (omq * omq);
  m.n3 = q * (1.0 + q * (4.0 + q)) / (omq * omq * omq);
  m.n4 = q * (1.0 + q * (11.0 + q * (11.0 + q))) / (omq * omq * omq * omq);
  return m;
}

// p_n = N (2n+1) q^n with N = (1-q)^2/(1+q).
TrialMoments trial_moments_rotational(double q) {
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("trial_moments_rotational: q outside (0, 1)");
  const double omq = 1.0 - q, opq = 1.0 + q;
  TrialMoments m;
  m.norm = omq * omq / opq;
  m.n1 = q * (3.0 + q) / (omq * opq);
  m.n2 = q * (3.0 + q * (8.0 + q)) / (omq * omq * opq);
  m.n3 = q * (3.0 + q * (25.0 + q * (19.0 + q))) / (omq * omq * omq * opq);
  m.n4 = q * (3.0 + q * (62.0 + q * (132.0 + q * (42.0 + q)))) /
         (omq * omq * omq * omq * opq);
  return m;
}

namespace {

template <class Fn>
double weighted_sum(const std::function<double(int)>& g, double q, double tol,
                    Fn&& f) {
  return sum_with_tail_bound(
             [&](std::int64_t n) {
               return g(static_cast<int>(n)) * std::pow(q, double(n)) *
                      f(static_cast<int>(n));
             },
             tol)
      .sum;
}

}  // namespace

TrialMoments trial_moments(const std::function<double(int)>& g, double q,
                           double tol) {
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("trial_moments: q outside (0, 1)");
  const double s0 = weighted_sum(g, q, tol, [](int) { return 1.0; });
  TrialMoments m;
  m.norm = 1.0 / s0;
  m.n1 = weighted_sum(g, q, tol, [](int n) { return double(n); }) / s0;
  m.n2 = weighted_sum(g, q, tol, [](int n) { return double(n) * n; }) / s0;
  m.n3 = weighted_sum(g, q, tol, [](int n) { return double(n) * n * n; }) / s0;
  m.n4 =
      weighted_sum(g, q, tol, [](int n) { return double(n) * n * n * n; }) /
      s0;
  return m;
}

SpectralMoments spectral_moments(const std::function<double(int)>& e,
                                 const std::function<double(int)>& g,
                                 double q, double tol) {
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("spectral_moments: q outside (0, 1)");
  const double s0 = weighted_sum(g, q, tol, [](int) { return 1.0; });
  SpectralMoments m;
  m.e1 = weighted_sum(g, q, tol, [&](int n) { return e(n); }) / s0;
  m.e2 = weighted_sum(g, q, tol, [&](int n) { return e(n) * e(n); }) / s0;
  m.en = weighted_sum(g, q, tol, [&](int n) { return e(n) * n; }) / s0;
  m.n1 = weighted_sum(g, q, tol, [](int n) { return double(n); }) / s0;
  m.n2 = weighted_sum(g, q, tol, [](int n) { return double(n) * n; }) / s0;
  return m;
}

SpectralMoments qao_spectral_moments_closed(const QaoParams& p, double omega,
                                            double q) {
  const auto t = trial_moments_uniform(q);
  const double a = (omega * omega + 1.0 + 2.0 * p.mu) / (4.0 * omega);
  const double b = 3.0 * p.lambda / (4.0 * omega * omega);
  // e(n) = c0 + c1 n + c2 n^2
  const double c0 = a + b, c1 = 2.0 * (a + b), c2 = 2.0 * b;
  SpectralMoments m;
  m.n1 = t.n1;
  m.n2 = t.n2;
  m.e1 = c0 + c1 * t.n1 + c2 * t.n2;
  m.en = c0 * t.n1 + c1 * t.n2 + c2 * t.n3;
  m.e2 = c0 * c0 + 2.0 * c0 * c1 * t.n1 + (c1 * c1 + 2.0 * c0 * c2) * t.n2 +
         2.0 * c1 * c2 * t.n3 + c2 * c2 * t.n4;
  return m;
}

CumulantEstimate cumulants_z0_z1(const SpectralMoments& m, double beta,
                                 double q, double norm) {
  const double lq = std::log(q);
  CumulantEstimate c;
  c.beta = beta;
  c.q_star = q;
  c.phi = -beta * m.e1 - lq * m.n1 - std::log(norm);
  c.phi1 = 0.5 * (beta * beta * (m.e2 - m.e1 * m.e1) +
                  2.0 * beta * lq * (m.en - m.e1 * m.n1) +
                  lq * lq * (m.n2 - m.n1 * m.n1));
  // phi1 is a variance, hence non-negative; the subtractions above can leave
  // rounding residue of either sign when it is essentially zero.
  if (c.phi1 < 0.0 && c.phi1 > -1e-10) c.phi1 = 0.0;
  c.z0 = std::exp(c.phi);
  c.z1 = std::exp(c.phi1);
  return c;
}

double qao_trial_energy_mean(const QaoParams& p, double omega, double q) {
  const auto t = trial_moments_uniform(q);
  return (omega * omega + 1.0 + 2.0 * p.mu) * (2.0 * t.n1 + 1.0) /
             (4.0 * omega) +
         3.0 * p.lambda * (1.0 + 2.0 * t.n1 + 2.0 * t.n2) /
             (4.0 * omega * omega);
}

double qao_phi(const QaoParams& p, double beta, double q, double omega) {
  const auto t = trial_moments_uniform(q);
  return -beta * qao_trial_energy_mean(p, omega, q) - std::log(q) * t.n1 -
         std::log(t.norm);
}

QaoStationary qao_stationary_at_q(const QaoParams& p, double q) {
  if (!p.valid())
    throw std::invalid_argument("qao_stationary_at_q: invalid parameters");
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("qao_stationary_at_q: q outside (0, 1)");
  QaoStationary s;
  s.q = q;
  const double ratio = (1.0 + q) / (1.0 - q);
  s.omega = positive_cubic_root(1.0 + 2.0 * p.mu, 6.0 * p.lambda * ratio);
  const double w = s.omega;
  const double denom = (w * w + 1.0 + 2.0 * p.mu) / (2.0 * w) +
                       3.0 * p.lambda * ratio / (w * w);
  s.beta = -std::log(q) / denom;
  s.phi = qao_phi(p, s.beta, q, w);
  return s;
}

CumulantEstimate qao_z0c(const QaoParams& p, double beta) {
  if (!(beta > 0.0))
    throw std::invalid_argument("qao_z0c: beta must be positive");
  // beta(q) decreases from +inf (q -> 0) to 0 (q -> 1); bracket in
  // t = ln q so the deep-cold regime stays representable.
  auto beta_at = [&](double t) {
    return qao_stationary_at_q(p, std::exp(t)).beta;
  };
  double t_hi = -1e-12;
  double t_lo = -4.0;
  while (beta_at(t_lo) <= beta) {
    t_lo *= 2.0;
    if (t_lo < -1e6)
      throw BracketFailure("qao_z0c: could not bracket the stationary q");
  }
  // The inversion assumes monotonicity; spot-check it on the bracket before
  // trusting the bisection.
  {
    double prev = beta_at(t_lo);
    for (int i = 1; i <= 64; ++i) {
      const double b = beta_at(t_lo + (t_hi - t_lo) * i / 64.0);
      if (!(b < prev))
        throw BracketFailure("qao_z0c: beta(q) is not decreasing on bracket");
      prev = b;
    }
  }
  const double t =
      brent_root([&](double tt) { return beta_at(tt) - beta; }, t_lo, t_hi,
                 1e-14);

  const auto st = qao_stationary_at_q(p, std::exp(t));
  const auto tm = trial_moments_uniform(st.q);
  const auto sm = qao_spectral_moments_closed(p, st.omega, st.q);
  auto est = cumulants_z0_z1(sm, beta, st.q, tm.norm);
  est.omega_star = st.omega;
  return est;
}

double qao_f0c(const QaoParams& p, double beta) {
  return -qao_z0c(p, beta).phi / beta;
}

double qao_f1c(const QaoParams& p, double beta) {
  const auto est = qao_z0c(p, beta);
  return -(est.phi + est.phi1) / beta;
}

double average_energy_ce(const QaoParams& p, double beta) {
  const auto est = qao_z0c(p, beta);
  return qao_trial_energy_mean(p, est.omega_star, est.q_star);
}

double generic_q_condition(double beta, const std::function<double(int)>& e,
                           const std::function<double(int)>& g, double tol) {
  if (!(beta > 0.0))
    throw std::invalid_argument("generic_q_condition: beta must be positive");
  // With u = ln q the trial averages satisfy d<f>/du = cov(f, n), so
  // d phi / d u = -beta cov(e, n) - u var(n): stationarity is
  //   beta cov(e, n) + u var(n) = 0.
  auto resid = [&](double u) {
    const auto m = spectral_moments(e, g, std::exp(u), 1e-14);
    return beta * (m.en - m.e1 * m.n1) + u * (m.n2 - m.n1 * m.n1);
  };
  auto phi_at = [&](double u) {
    const double q = std::exp(u);
    const auto m = spectral_moments(e, g, q, 1e-14);
    const double s0 = 1.0 / trial_moments(g, q, 1e-14).norm;
    return -beta * m.e1 - u * m.n1 + std::log(s0);
  };

  const double gap = e(1) - e(0);
  double u_lo = -3.0 * beta * std::max(gap, 1.0) - 30.0;
  // The scan must stop short of q = 1 or the moment series stop converging;
  // the stationary u scales like -beta * gap, so a hundredth of that is a
  // safe ceiling even at high temperature.
  const double u_hi = -std::min(1e-3, 0.01 * beta * std::max(gap, 1e-6));

  const int kScan = 400;
  std::vector<double> roots;
  double prev_u = u_lo, prev_r = resid(u_lo);
  for (int i = 1; i <= kScan; ++i) {
    const double u = u_lo + (u_hi - u_lo) * i / kScan;
    const double r = resid(u);
    if (prev_r == 0.0)
      roots.push_back(prev_u);
    else if ((prev_r > 0.0) != (r > 0.0))
      roots.push_back(brent_root(resid, prev_u, u, tol));
    prev_u = u;
    prev_r = r;
  }
  if (roots.empty())
    throw NoStationaryPoint(
        "generic_q_condition: no stationary q in scan range");
  double best = roots.front();
  if (roots.size() > 1) {
    double best_phi = phi_at(best);
    for (std::size_t i = 1; i < roots.size(); ++i) {
      const double ph = phi_at(roots[i]);
      if (ph > best_phi) {
        best_phi = ph;
        best = roots[i];
      }
    }
    std::fprintf(stderr,
                 "generic_q_condition: %zu stationary points at beta = %g; "
                 "keeping the phi-maximising one (q = %.12g)\n",
                 roots.size(), beta, std::exp(best));
  }
  return std::exp(best);
}

}  // namespace qstat
