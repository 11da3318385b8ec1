#include "qstat/qao.hpp"

#include <cmath>
#include <stdexcept>

#include "qstat/roots.hpp"

namespace qstat {
namespace {

void check_params(const QaoParams& p) {
  if (!p.valid())
    throw std::invalid_argument(
        "QaoParams: need 1 + 2 mu > 0 and lambda >= 0");
}

}  // namespace

double qao_omega_n(const QaoParams& p, int n) {
  check_params(p);
  const double a = 1.0 + 2.0 * p.mu;
  const double b =
      6.0 * p.lambda * (2.0 * n * n + 2.0 * n + 1.0) / (2.0 * n + 1.0);
  return positive_cubic_root(a, b);
}

double qao_diagonal(const QaoParams& p, int n, double omega) {
  const double w = omega;
  return (w * w + 1.0 + 2.0 * p.mu) * (2.0 * n + 1.0) / (4.0 * w) +
         3.0 * p.lambda * (1.0 + 2.0 * n + 2.0 * n * n) / (4.0 * w * w);
}

double qao_energy0(const QaoParams& p, int n) {
  return qao_diagonal(p, n, qao_omega_n(p, n));
}

QaoCorrections qao_corrections(const QaoParams& p, int n, double omega) {
  check_params(p);
  const double w = omega, lam = p.lambda, mu = p.mu;
  const double w3 = w * w * w;
  const double P = (n + 1.0) * (n + 2.0);
  const double Q = (n + 3.0) * (n + 4.0);

  QaoCorrections c;
  // Second iteration: the two upward couplings (+2, +4) in closed form.
  const double up2 = w * (1.0 + 2.0 * mu - w * w) + 2.0 * lam * (2.0 * n + 3.0);
  c.de2 = -P * up2 * up2 /
              (16.0 * w * w *
               (w * (w * w + 1.0 + 2.0 * mu) + 3.0 * lam * (3.0 + 2.0 * n))) -
          lam * lam * P * Q /
              (32.0 * w * w *
               (w * (w * w + 1.0 + 2.0 * mu) + 3.0 * lam * (5.0 + 2.0 * n)));

  // Third iteration.
  const double n1 = 2.0 * (2.0 * n + 3.0) * lam + w * (1.0 + 2.0 * mu) - w3;
  const double d1 = 3.0 * (2.0 * n + 3.0) * lam + w * (1.0 + 2.0 * mu) + w3;
  const double d2 = 3.0 * (2.0 * n + 5.0) * lam + w * (1.0 + 2.0 * mu) + w3;
  const double sp = std::sqrt(P), sq = std::sqrt(Q);
  c.de3 = -(1.0 / (256.0 * w * w)) *
          (4.0 * P * sp * n1 * n1 * n1 / (d1 * d1) +
           2.0 * lam * P * sp * sq * n1 * n1 / (d1 * d2) +
           2.0 * lam * lam * Q * P * sp * n1 / (d1 * d2) +
           lam * lam * lam * P * sp * Q * sq / (d2 * d2));
  return c;
}

StrongCouplingCoeff qao_strong_coupling_bn(int n) {
  StrongCouplingCoeff c;
  c.n = n;
  const double m = 2.0 * n + 1.0;
  c.b_n = std::pow(0.75, 4.0 / 3.0) *
          std::cbrt((1.0 + 2.0 * n + 2.0 * n * n) * m * m);
  return c;
}

double QaoProvider::evaluate(int n, int k, double omega) const {
  if (n > k) std::swap(n, k);
  const double w = omega;
  switch (k - n) {
    case 0:
      return qao_diagonal(p_, n, w);
    case 2:
      return (w * (1.0 + 2.0 * p_.mu - w * w) +
              2.0 * p_.lambda * (2.0 * n + 3.0)) *
             std::sqrt((n + 1.0) * (n + 2.0)) / (4.0 * w * w);
    case 4:
      return p_.lambda *
             std::sqrt((n + 1.0) * (n + 2.0) * (n + 3.0) * (n + 4.0)) /
             (4.0 * w * w);
    default:
      return 0.0;
  }
}

std::optional<double> QaoProvider::diagonal_derivative(int n,
                                                       double omega) const {
  const double w = omega;
  return (2.0 * n + 1.0) / 4.0 * (1.0 - (1.0 + 2.0 * p_.mu) / (w * w)) -
         3.0 * p_.lambda * (1.0 + 2.0 * n + 2.0 * n * n) / (2.0 * w * w * w);
}

OmLevel qao_om_level(const QaoParams& p, int n) {
  OmLevel lv;
  lv.n = n;
  lv.omega = qao_omega_n(p, n);
  lv.e0 = qao_diagonal(p, n, lv.omega);
  const auto c = qao_corrections(p, n, lv.omega);
  lv.de2 = c.de2;
  lv.de3 = c.de3;
  return lv;
}

double qao_rs_pt2(const QaoParams& p, int n) {
  check_params(p);
  // V = mu x^2 + lambda x^4 in the omega = 1 harmonic basis; equivalently
  // the full matrix elements at omega = 1 minus the harmonic part.
  QaoProvider full(p);
  auto e0 = [](int k) { return k + 0.5; };
  auto v = [&](int a, int b) {
    double h = full.evaluate(a, b, 1.0);
    if (a == b) h -= a + 0.5;
    return h;
  };
  return rs_pt2_energy(e0, v, full.band(), full.parity_step(), n);
}

}  // namespace qstat
