#pragma once

namespace qstat {

// Quantum rotator, levels n(n+1) with degeneracy 2n+1; x = beta * theta_r.

// Direct partition sum  Z(x) = sum (2n+1) exp[-x n(n+1)]  with a geometric
// tail bound.  Throws SlowConvergence for x below 1e-8.
double rotator_partition_direct(double x, double tol = 1e-14);

struct RotatorMoments {
  double norm = 0.0;   // N = (1-q)^2 / (1+q)
  double nbar = 0.0;   // q(3+q) / (1-q^2)
  double n2bar = 0.0;  // q(3+8q+q^2) / ((1+q)(1-q)^2)
};

RotatorMoments rotator_trial_moments(double q);

// Temperature parameter at which q is stationary:
//   x(q) = -(3+2q+3q^2)(1-q) ln q / (6 (1+q)^3).
double rotator_x_of_q(double q);

// Exponent of the zeroth-order estimate:
//   phi(x,q) = -6xq/(1-q)^2 - (3q+q^2)/(1-q^2) ln q - ln[(1-q)^2/(1+q)].
double rotator_phi(double x, double q);

struct RotatorZ0 {
  double z0 = 0.0;
  double q_star = 0.0;
};

// Inverts x(q) by bisection in ln q and returns exp[phi(x, q*)].
// Throws BracketFailure if the monotonicity of x(q) breaks.
RotatorZ0 rotator_z0(double x);

// First-correction exponent phi1 at a stationary q, via the closed form
//   (q^2/6)(15+4q+26q^2+4q^3+15q^4) / ((1-q)^2 (1+q)^6) * ln^2 q,
// cross-checked against the generic second-cumulant moment evaluation;
// on disagreement beyond 1e-8 the moment evaluation wins (logged).
double rotator_phi1(double q);

// Multiplicative first-correction factor exp(phi1); the corrected estimate
// is z0 * z1_factor.
double rotator_z1_factor(double q);

// Generic second-cumulant exponent from series moments (the oracle route):
//   (1/2)[x^2 var(E) + 2x ln q cov(E,n) + ln^2 q var(n)],  E = n^2+n.
double rotator_phi1_generic(double x, double q);

}  // namespace qstat
