#include "qstat/om_core.hpp"

#include <cmath>
#include <vector>

#include "qstat/roots.hpp"

namespace qstat {
namespace {

// Basis indices coupled to n: same parity class, 0 <= m <= k_trunc, m != n.
std::vector<int> lattice_indices(int n, int parity_step, int k_trunc) {
  std::vector<int> out;
  const int start = n % parity_step;
  for (int m = start; m <= k_trunc; m += parity_step)
    if (m != n) out.push_back(m);
  return out;
}

}  // namespace

IterationState om_iterate(const MatrixElementProvider& provider, int n,
                          double omega, int s_max, int k_trunc, double tol) {
  if (k_trunc <= n + provider.band())
    throw std::invalid_argument("om_iterate: truncation too small for level");

  const int step = provider.parity_step();
  const int band = provider.band();
  const auto idx = lattice_indices(n, step, k_trunc);

  // Cache the diagonal and every banded coupling once.
  const double h_nn = provider.evaluate(n, n, omega);
  std::vector<double> diag(idx.size()), coup_n(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    diag[i] = provider.evaluate(idx[i], idx[i], omega);
    coup_n[i] =
        std::abs(idx[i] - n) <= band ? provider.evaluate(n, idx[i], omega) : 0.0;
    if (std::abs(diag[i] - h_nn) <= kGapFloor * std::max(1.0, std::abs(h_nn)))
      throw DegenerateDiagonal("om_iterate: diagonal gap below floor at m = " +
                               std::to_string(idx[i]));
  }

  IterationState st;
  st.truncation = k_trunc;
  std::vector<double> c(idx.size(), 0.0), c_next(idx.size(), 0.0);
  std::vector<double> e_hist = {h_nn, h_nn};  // E^(0), E^(1)
  int small_steps = 0;

  for (int s = 1; s < s_max; ++s) {
    // C^(s) from C^(s-1) and E^(s-1)
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const int m = idx[i];
      double acc = coup_n[i];  // H_mn
      for (std::size_t j = 0; j < idx.size(); ++j) {
        if (j == i) continue;
        const int k = idx[j];
        if (std::abs(m - k) > band || c[j] == 0.0) continue;
        acc += c[j] * provider.evaluate(m, k, omega);
      }
      c_next[i] = -acc / (diag[i] - e_hist[s - 1]);
    }
    c.swap(c_next);

    // E^(s+1) from C^(s)
    double e = h_nn;
    for (std::size_t i = 0; i < idx.size(); ++i) e += c[i] * coup_n[i];

    st.s = s + 1;
    st.energies.push_back(e);
    const double prev = e_hist.back();
    e_hist.push_back(e);
    // A single stalled step is not convergence (a vanishing coupling can
    // freeze one update); require two consecutive small differences.
    if (std::abs(e - prev) <= tol * std::max(1.0, std::abs(e)))
      ++small_steps;
    else
      small_steps = 0;
    if (small_steps >= 2) {
      st.converged = true;
      break;
    }
  }

  for (std::size_t i = 0; i < idx.size(); ++i)
    st.coefficients[idx[i]] = c[i];
  if (!st.converged && st.energies.size() >= 3) {
    // Only a detected oscillation is fatal; a slowly settling sequence is
    // returned as-is with converged = false.
    const auto& e = st.energies;
    const std::size_t k = e.size();
    const double d1 = e[k - 1] - e[k - 2];
    const double d2 = e[k - 2] - e[k - 3];
    if (d1 * d2 < 0.0 && std::abs(d1) >= std::abs(d2))
      throw NonConvergence("om_iterate: oscillating after " +
                               std::to_string(s_max) + " iterations",
                           e[k - 1], e[k - 2]);
  }
  return st;
}

double om_second_order(const MatrixElementProvider& provider, int n,
                       double omega, int k_trunc) {
  const double h_nn = provider.evaluate(n, n, omega);
  double e = h_nn;
  for (int m : lattice_indices(n, provider.parity_step(), k_trunc)) {
    if (std::abs(m - n) > provider.band()) continue;
    const double h_nm = provider.evaluate(n, m, omega);
    if (h_nm == 0.0) continue;
    const double gap = provider.evaluate(m, m, omega) - h_nn;
    if (std::abs(gap) <= kGapFloor * std::max(1.0, std::abs(h_nn)))
      throw DegenerateDiagonal("om_second_order: diagonal gap below floor");
    e -= h_nm * h_nm / gap;
  }
  return e;
}

double optimize_omega(const MatrixElementProvider& provider, int n, double lo,
                      double hi, double rel_tol) {
  auto deriv = [&](double w) {
    if (auto d = provider.diagonal_derivative(n, w)) return *d;
    const double h = 1e-6 * std::max(1.0, std::abs(w));
    return (provider.evaluate(n, n, w + h) - provider.evaluate(n, n, w - h)) /
           (2.0 * h);
  };
  try {
    return brent_root(deriv, lo, hi, rel_tol);
  } catch (const BracketFailure&) {
    throw NoStationaryPoint("optimize_omega: dH_nn/domega has no sign change "
                            "in bracket for n = " +
                            std::to_string(n));
  }
}

double rs_pt2_energy(const std::function<double(int)>& e0,
                     const std::function<double(int, int)>& v, int band,
                     int parity_step, int n) {
  double e = e0(n) + v(n, n);
  for (int m = n - band; m <= n + band; ++m) {
    if (m < 0 || m == n || (m - n) % parity_step != 0) continue;
    const double vmn = v(m, n);
    if (vmn == 0.0) continue;
    e += vmn * vmn / (e0(n) - e0(m));
  }
  return e;
}

double thermo_cpt2_free_energy(const std::function<double(int)>& e0,
                               const std::function<double(int, int)>& v,
                               int band, int parity_step, double mu,
                               double beta, int k_trunc) {
  // Unperturbed free energy and Boltzmann weights w_n = exp[beta (F0 - E_n)].
  const double ground = e0(0);
  double z0 = 0.0;
  for (int n = 0; n <= k_trunc; ++n) z0 += std::exp(-beta * (e0(n) - ground));
  const double tail = std::exp(-beta * (e0(k_trunc) - ground));
  if (tail > 1e-12 * z0)
    throw TruncationInsufficient(
        "thermo_cpt2_free_energy: Boltzmann tail not negligible at k_trunc");
  const double f0 = ground - std::log(z0) / beta;

  std::vector<double> w(k_trunc + 1);
  for (int n = 0; n <= k_trunc; ++n) w[n] = std::exp(beta * (f0 - e0(n)));

  double first = 0.0, diag_sq = 0.0, second = 0.0;
  for (int n = 0; n <= k_trunc; ++n) {
    const double vnn = v(n, n);
    first += vnn * w[n];
    diag_sq += vnn * vnn * w[n];
    for (int m = n - band; m <= n + band; ++m) {
      if (m < 0 || m > k_trunc || m == n || (m - n) % parity_step != 0)
        continue;
      const double vmn = v(m, n);
      if (vmn == 0.0) continue;
      second += vmn * vmn * w[n] / (e0(n) - e0(m));
    }
  }

  return f0 + mu * first + mu * mu * second +
         0.5 * beta * mu * mu * (first * first - diag_sq);
}

}  // namespace qstat
