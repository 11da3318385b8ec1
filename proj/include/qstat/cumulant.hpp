#pragma once

#include <functional>
#include <vector>

#include "qstat/qao.hpp"

namespace qstat {

// Cumulant machinery for partition-function estimates built on a trial
// density  p_n = N g_n q^n,  N = 1 / sum g_k q^k.

// Trial-average moments of n through fourth order for degeneracies g_n.
struct TrialMoments {
  double norm = 0.0;  // N
  double n1 = 0.0;
  double n2 = 0.0;
  double n3 = 0.0;
  double n4 = 0.0;
};

TrialMoments trial_moments_uniform(double q);      // g_n = 1 (closed forms)
TrialMoments trial_moments_rotational(double q);   // g_n = 2n+1
TrialMoments trial_moments(const std::function<double(int)>& g, double q,
                           double tol = 1e-14);

// Trial moments of a level function e(n) and its cross moments against n,
// by direct summation.
struct SpectralMoments {
  double e1 = 0.0;   // <e>
  double e2 = 0.0;   // <e^2>
  double en = 0.0;   // <e n>
  double n1 = 0.0;
  double n2 = 0.0;
};

SpectralMoments spectral_moments(const std::function<double(int)>& e,
                                 const std::function<double(int)>& g,
                                 double q, double tol = 1e-14);

// Same moments from the closed geometric forms when e is the oscillator
// diagonal e(n) = a(2n+1) + b(1+2n+2n^2) at basis frequency omega.
SpectralMoments qao_spectral_moments_closed(const QaoParams& p, double omega,
                                            double q);

// Zeroth-order estimate and first correction at inverse temperature beta
// with trial parameter q:
//   phi  = -beta <e> - ln q <n> - ln N         (ln of the estimate)
//   phi1 = (1/2)[ beta^2 var(e) + 2 beta ln q cov(e,n) + ln^2 q var(n) ]
// The corrected estimate is z0 * z1 with z1 = exp(phi1).
struct CumulantEstimate {
  double beta = 0.0;
  double phi = 0.0;
  double phi1 = 0.0;       // always >= 0 (variance form)
  double z0 = 0.0;         // exp(phi)
  double z1 = 0.0;         // exp(phi1), multiplicative correction
  double q_star = 0.0;
  double omega_star = 0.0; // oscillator path only
};

CumulantEstimate cumulants_z0_z1(const SpectralMoments& m, double beta,
                                 double q, double norm);

// --- Oscillator specialisation ------------------------------------------

// Exponent phi as a free function of (q, omega) at fixed beta; the solvers
// below locate its stationary point.
double qao_phi(const QaoParams& p, double beta, double q, double omega);

// Stationary point parametrised by q:
//   omega(q): w^3 - w(1+2mu) - 6 lambda (1+q)/(1-q) = 0
//   beta(q) = -ln q / [ (w^2+1+2mu)/(2w) + 3 lambda (1+q) / (w^2 (1-q)) ]
struct QaoStationary {
  double q = 0.0;
  double omega = 0.0;
  double beta = 0.0;
  double phi = 0.0;
};

QaoStationary qao_stationary_at_q(const QaoParams& p, double q);

// Full estimate at given beta: inverts beta(q) by bisection in ln q (with a
// startup monotonicity assertion), then evaluates phi, phi1 at (q*, w*).
CumulantEstimate qao_z0c(const QaoParams& p, double beta);

// Free energies -ln(z0)/beta and -ln(z0 z1)/beta from the estimate.
double qao_f0c(const QaoParams& p, double beta);
double qao_f1c(const QaoParams& p, double beta);

// Average energy of the zeroth-order estimate.  The estimate is stationary
// in (q, omega), so only the explicit beta dependence survives:
//   <E> = -d ln Z0 / d beta = <e> at (q*, omega*).
double average_energy_ce(const QaoParams& p, double beta);

// Trial mean of the oscillator diagonal at (omega, q).
double qao_trial_energy_mean(const QaoParams& p, double omega, double q);

// Degeneracy-agnostic stationary q for an arbitrary spectrum: solves
// d phi / d q = 0 by scan plus bisection on the series-moment derivative.
// With several stationary points the one maximising phi wins (logged).
double generic_q_condition(double beta, const std::function<double(int)>& e,
                           const std::function<double(int)>& g,
                           double tol = 1e-12);

}  // namespace qstat
