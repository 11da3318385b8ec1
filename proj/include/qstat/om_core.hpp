#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "qstat/errors.hpp"

namespace qstat {

// Matrix elements H_nk(omega) of a Hamiltonian in an omega-dependent basis.
// Implementations must be symmetric in (n, k) and vanish exactly outside the
// band |n - k| > band(); nonzero couplings occur only at offsets that are
// multiples of parity_step().
class MatrixElementProvider {
 public:
  virtual ~MatrixElementProvider() = default;

  virtual double evaluate(int n, int k, double omega) const = 0;
  virtual int band() const = 0;
  virtual int parity_step() const = 0;

  // Analytic d H_nn / d omega when available; otherwise the caller falls
  // back to central differences.
  virtual std::optional<double> diagonal_derivative(int /*n*/,
                                                    double /*omega*/) const {
    return std::nullopt;
  }
};

// Relative diagonal-gap floor below which the iteration refuses to run
// (the degenerate case needs a secular treatment this engine does not do).
inline constexpr double kGapFloor = 1e-8;

struct IterationState {
  int s = 0;                            // last iteration performed
  std::vector<double> energies;         // E^(2), E^(3), ..., E^(s)
  std::map<int, double> coefficients;   // k -> C_nk at the last iteration
  int truncation = 0;
  bool converged = false;

  double value() const { return energies.back(); }
};

// Iterates the eigenvalue recurrences for level n in the omega basis.
// Stops early once |E^(s) - E^(s-1)| <= tol * |E^(s)|.  Throws
// DegenerateDiagonal when a reachable diagonal element comes within
// kGapFloor (relative) of H_nn, and NonConvergence when the iterates are
// still oscillating at s_max.
IterationState om_iterate(const MatrixElementProvider& provider, int n,
                          double omega, int s_max, int k_trunc,
                          double tol = 1e-12);

// Second iteration in closed form:
//   H_nn - sum_{m != n} H_nm H_mn / (H_mm - H_nn),
// the sum restricted to the provider's band and parity.
double om_second_order(const MatrixElementProvider& provider, int n,
                       double omega, int k_trunc);

// Stationary basis frequency for level n: the root of d H_nn / d omega = 0
// inside [lo, hi].  Throws NoStationaryPoint if the derivative does not
// change sign over the bracket.
double optimize_omega(const MatrixElementProvider& provider, int n, double lo,
                      double hi, double rel_tol = 1e-12);

// Second-order Rayleigh-Schrodinger energy for unperturbed levels e0(n) and
// perturbation elements v(n, k) (banded, symmetric):
//   e0(n) + V_nn + sum_{m != n} V_mn^2 / (e0(n) - e0(m)).
double rs_pt2_energy(const std::function<double(int)>& e0,
                     const std::function<double(int, int)>& v, int band,
                     int parity_step, int n);

// Thermodynamic perturbation theory through second order for
// H = H0 + mu*V, with unperturbed spectrum e0(n) and perturbation matrix
// v(n, k).  Throws TruncationInsufficient when the Boltzmann tail at
// k_trunc is not negligible.
double thermo_cpt2_free_energy(const std::function<double(int)>& e0,
                               const std::function<double(int, int)>& v,
                               int band, int parity_step, double mu,
                               double beta, int k_trunc);

}  // namespace qstat
