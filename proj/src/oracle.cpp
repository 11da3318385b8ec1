#include "qstat/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "qstat/rotator.hpp"
#include "qstat/series.hpp"

namespace qstat {
namespace {

std::vector<double> eigenvalues(const QaoProvider& prov, int m, double omega) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < std::min(m, i + prov.band() + 1); ++j) {
      const double v = prov.evaluate(i, j, omega);
      h(i, j) = v;
      h(j, i) = v;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      h, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + m);
}

// Boltzmann sum over term(n) = weight relative to the ground level; stops
// on the geometric tail bound.  Shared by the direct-sum paths.
struct BoltzmannSum {
  double z = 0.0;      // sum of relative weights
  double ze = 0.0;     // sum of e(n) * weight
  double tail = 0.0;
  int terms = 0;
};

template <class TermFn, class EnergyFn>
BoltzmannSum boltzmann_sum(TermFn&& term, EnergyFn&& energy, double tol) {
  constexpr int kMax = 20'000'000;
  BoltzmannSum s;
  double prev = 0.0;
  for (int n = 0; n < kMax; ++n) {
    const double t = term(n);
    s.z += t;
    s.ze += energy(n) * t;
    ++s.terms;
    const double at = std::abs(t);
    if (n >= 4 && at > 0.0 && std::abs(prev) > 0.0) {
      const double r = at / std::abs(prev);
      if (r < 1.0) {
        s.tail = at * r / (1.0 - r);
        if (s.tail <= tol * std::abs(s.z)) return s;
      }
    } else if (n >= 4 && at == 0.0 && std::abs(prev) == 0.0) {
      s.tail = 0.0;
      return s;
    }
    prev = t;
  }
  throw TailUnbounded("boltzmann_sum: tail bound not reached in term budget");
}

}  // namespace

SpectrumTable diagonalize_qao(const QaoParams& p, int m, double rel_tol,
                              double omega) {
  if (m < 20) throw std::invalid_argument("diagonalize_qao: basis too small");
  QaoProvider prov(p);
  const double w = omega > 0.0 ? omega : qao_omega_n(p, 0);
  const auto coarse = eigenvalues(prov, m, w);
  const auto fine = eigenvalues(prov, 2 * m, w);

  SpectrumTable t;
  t.basis_size = m;
  const int cap = m / 3;
  t.energies.assign(fine.begin(), fine.begin() + cap);
  while (t.converged_count < cap &&
         std::abs(coarse[t.converged_count] - fine[t.converged_count]) <=
             rel_tol *
                 std::max(1.0, std::abs(fine[t.converged_count])))
    ++t.converged_count;
  if (t.converged_count == 0)
    throw ConvergenceTooFew(
        "diagonalize_qao: no level stable under basis doubling");
  return t;
}

ThermoReference partition_direct(const std::function<double(int)>& e,
                                 const std::function<double(int)>& g,
                                 double beta, double tol) {
  if (!(beta > 0.0))
    throw std::invalid_argument("partition_direct: beta must be positive");
  const double ground = e(0);
  const auto s = boltzmann_sum(
      [&](int n) { return g(n) * std::exp(-beta * (e(n) - ground)); },
      [&](int n) { return e(n); }, tol);
  ThermoReference ref;
  ref.z = s.z * std::exp(-beta * ground);
  ref.free_energy = ground - std::log(s.z) / beta;
  ref.avg_energy = s.ze / s.z;
  ref.tail_estimate = s.tail;
  ref.levels_used = s.terms;
  return ref;
}

ThermoReference partition_from_levels(const std::vector<double>& levels,
                                      double beta, double tol) {
  if (levels.empty())
    throw std::invalid_argument("partition_from_levels: empty level table");
  const double ground = levels.front();
  double z = 0.0, ze = 0.0;
  for (double e : levels) {
    const double w = std::exp(-beta * (e - ground));
    z += w;
    ze += e * w;
  }
  ThermoReference ref;
  // Bound the omitted remainder by a geometric series built on the last
  // observed gap (valid while gaps keep growing, as they do here).
  if (levels.size() >= 2) {
    const double gap = levels.back() - levels[levels.size() - 2];
    const double last = std::exp(-beta * (levels.back() - ground));
    const double r = std::exp(-beta * gap);
    ref.tail_estimate = r < 1.0 ? last * r / (1.0 - r) : INFINITY;
    if (!(ref.tail_estimate <= tol * z))
      throw TruncationInsufficient(
          "partition_from_levels: Boltzmann tail exceeds tolerance");
  }
  ref.z = z * std::exp(-beta * ground);
  ref.free_energy = ground - std::log(z) / beta;
  ref.avg_energy = ze / z;
  ref.levels_used = static_cast<int>(levels.size());
  return ref;
}

ThermoReference qao_partition_reference(const QaoParams& p, double beta,
                                        double tol) {
  int m = 120;
  for (int attempt = 0; attempt < 6; ++attempt) {
    const auto table = diagonalize_qao(p, m);
    std::vector<double> lv(table.energies.begin(),
                           table.energies.begin() + table.converged_count);
    try {
      return partition_from_levels(lv, beta, tol);
    } catch (const TruncationInsufficient&) {
      m *= 2;
    }
  }
  throw TruncationInsufficient(
      "qao_partition_reference: basis growth exhausted");
}

ThermoReference rotator_reference(double x, double tol) {
  const auto s = boltzmann_sum(
      [&](int n) { return (2.0 * n + 1.0) * std::exp(-x * n * (n + 1.0)); },
      [&](int n) { return n * (n + 1.0); }, tol);
  ThermoReference ref;
  ref.z = s.z;
  ref.free_energy = -std::log(s.z) / x;
  ref.avg_energy = s.ze / s.z;
  ref.tail_estimate = s.tail;
  ref.levels_used = s.terms;
  return ref;
}

double harmonic_free_energy(double w, double beta) {
  return 0.5 * w + std::log1p(-std::exp(-beta * w)) / beta;
}

double qao_f_om0(const QaoParams& p, double beta, double tol) {
  return partition_direct([&](int n) { return qao_energy0(p, n); },
                          [](int) { return 1.0; }, beta, tol)
      .free_energy;
}

double qao_f_om2(const QaoParams& p, double beta, double tol) {
  auto e2 = [&](int n) {
    const auto lv = qao_om_level(p, n);
    return lv.e2();
  };
  return partition_direct(e2, [](int) { return 1.0; }, beta, tol).free_energy;
}

double qao_f01(const QaoParams& p, double beta, double tol) {
  const double ground = qao_energy0(p, 0);
  const auto s = boltzmann_sum(
      [&](int n) {
        const auto lv = qao_om_level(p, n);
        return std::exp(-beta * (lv.e0 - ground)) * (1.0 - beta * lv.de2);
      },
      [](int) { return 0.0; }, tol);
  if (!(s.z > 0.0))
    throw LogOfNonPositive("qao_f01: linearised partition sum non-positive");
  return ground - std::log(s.z) / beta;
}

AsymptoticZ qao_asymptotic_z(const QaoParams& p, double beta,
                             ZRegime regime) {
  AsymptoticZ a;
  switch (regime) {
    case ZRegime::LowT:
      a.value = 1.0 + std::exp(-beta * qao_energy0(p, 0));
      a.in_regime = beta > 5.0;
      break;
    case ZRegime::WeakCoupling: {
      const double em = std::exp(-beta);
      const double d = 1.0 - em;
      a.value = std::exp(-beta / 2.0) / d *
                (1.0 + 3.0 * p.lambda * em / (d * d));
      a.in_regime = p.lambda / (d * d) < 0.1;
      break;
    }
    case ZRegime::StrongCoupling: {
      const double scale = std::cbrt(p.lambda);
      a.value = sum_with_tail_bound(
                    [&](std::int64_t n) {
                      return std::exp(
                          -beta * scale *
                          qao_strong_coupling_bn(static_cast<int>(n)).b_n);
                    },
                    1e-14)
                    .sum;
      a.in_regime = p.lambda > 10.0;
      break;
    }
  }
  return a;
}

}  // namespace qstat
