#pragma once

#include "qstat/om_core.hpp"

namespace qstat {

// Anharmonic oscillator H = (p^2 + x^2)/2 + mu x^2 + lambda x^4.
struct QaoParams {
  double mu = 0.0;      // quadratic coupling, 1 + 2 mu > 0
  double lambda = 0.0;  // quartic coupling, >= 0

  bool valid() const { return 1.0 + 2.0 * mu > 0.0 && lambda >= 0.0; }
};

// Unique positive root of w^3 - w(1+2mu) - 6 lambda (2n^2+2n+1)/(2n+1) = 0.
double qao_omega_n(const QaoParams& p, int n);

// Diagonal element H_nn at basis frequency omega.
double qao_diagonal(const QaoParams& p, int n, double omega);

// Zeroth-order level energy, i.e. the diagonal at its stationary frequency.
double qao_energy0(const QaoParams& p, int n);

struct QaoCorrections {
  double de2 = 0.0;  // second-iteration correction (both terms <= 0)
  double de3 = 0.0;  // third-iteration correction
};

// Closed-form second- and third-iteration corrections at basis frequency
// omega.  Cumulative energies are e0 + de2 and e0 + de2 + de3.
QaoCorrections qao_corrections(const QaoParams& p, int n, double omega);

struct StrongCouplingCoeff {
  int n = 0;
  double b_n = 0.0;
};

// Coefficient of the lambda^(1/3) growth of level n at strong coupling,
// from the large-lambda limit of the zeroth-order closed form:
//   (3/4)^(4/3) [(1+2n+2n^2)(1+2n)^2]^(1/3).
StrongCouplingCoeff qao_strong_coupling_bn(int n);

// Banded matrix-element provider for the oscillator: offsets 0, +-2, +-4.
class QaoProvider final : public MatrixElementProvider {
 public:
  explicit QaoProvider(const QaoParams& p) : p_(p) {}

  double evaluate(int n, int k, double omega) const override;
  int band() const override { return 4; }
  int parity_step() const override { return 2; }
  std::optional<double> diagonal_derivative(int n,
                                            double omega) const override;

  const QaoParams& params() const { return p_; }

 private:
  QaoParams p_;
};

struct OmLevel {
  int n = 0;
  double omega = 0.0;  // stationary basis frequency
  double e0 = 0.0;     // zeroth-order energy
  double de2 = 0.0;
  double de3 = 0.0;

  double e2() const { return e0 + de2; }
  double e3() const { return e0 + de2 + de3; }
};

// Full per-level solution: stationary frequency, zeroth order and the two
// closed-form corrections evaluated there.
OmLevel qao_om_level(const QaoParams& p, int n);

// Second-order Rayleigh-Schrodinger energy in the fixed omega = 1 basis
// with V = mu x^2 + lambda x^4 (the canonical perturbation baseline).
double qao_rs_pt2(const QaoParams& p, int n);

}  // namespace qstat
