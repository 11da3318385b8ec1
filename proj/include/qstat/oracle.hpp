#pragma once

#include <functional>
#include <vector>

#include "qstat/qao.hpp"

namespace qstat {

// Brute-force references the estimation machinery is checked against,
// plus the direct Boltzmann sums over the approximate spectra.

struct SpectrumTable {
  std::vector<double> energies;  // ascending, from the doubled basis
  int basis_size = 0;            // truncation of the coarse run
  int converged_count = 0;       // prefix stable under basis doubling
};

// Dense diagonalisation of the oscillator in a harmonic basis of size m at
// basis frequency omega (default: the n = 0 stationary frequency, which
// keeps entries O(1) at large lambda).  The truncation is doubled once and
// a level counts as converged while the two runs agree to rel_tol; at most
// m/3 levels are reported.  Throws ConvergenceTooFew when not even the
// ground state settles.
SpectrumTable diagonalize_qao(const QaoParams& p, int m = 120,
                              double rel_tol = 1e-9, double omega = 0.0);

struct ThermoReference {
  double z = 0.0;
  double free_energy = 0.0;
  double avg_energy = 0.0;
  double tail_estimate = 0.0;  // bound on the truncated contribution
  int levels_used = 0;
};

// Z = sum g_n exp(-beta e(n)) with adaptive cutoff on the geometric tail
// bound; also fills F = -ln(Z)/beta and the Boltzmann-average energy.
// Levels are summed relative to e(0), so beta as small as desired is fine
// as long as the spectrum keeps growing.  Throws TailUnbounded when the
// term ratio fails to drop below 1 within the term budget.
ThermoReference partition_direct(const std::function<double(int)>& e,
                                 const std::function<double(int)>& g,
                                 double beta, double tol = 1e-12);

// Same sums over an explicit finite level table (g = 1); requires the
// table's own tail bound to clear tol, else throws TruncationInsufficient.
ThermoReference partition_from_levels(const std::vector<double>& levels,
                                      double beta, double tol = 1e-12);

// Diagonalise, then sum; the basis grows until the Boltzmann tail clears.
ThermoReference qao_partition_reference(const QaoParams& p, double beta,
                                        double tol = 1e-12);

// Rotator: Z, -ln Z / x and <n(n+1)> by direct summation.
ThermoReference rotator_reference(double x, double tol = 1e-14);

// Harmonic oscillator at frequency w: F = w/2 + ln(1 - e^{-beta w})/beta.
double harmonic_free_energy(double w, double beta);

// Free energies from direct sums over the approximate oscillator spectra:
//   f_om0: levels E_n^(0) (each at its own stationary frequency)
//   f_om2: levels E_n^(0) + dE2_n
//   f01:   linearised correction, -ln[ sum e^{-beta E^(0)} (1 - beta dE2) ]
// qao_f01 throws LogOfNonPositive once the linearised sum goes non-positive
// at large beta (the documented failure mode; no clamping).
double qao_f_om0(const QaoParams& p, double beta, double tol = 1e-12);
double qao_f_om2(const QaoParams& p, double beta, double tol = 1e-12);
double qao_f01(const QaoParams& p, double beta, double tol = 1e-12);

// Closed-form asymptotic partition functions.  The in_regime flag is a
// non-fatal warning: the value is still returned outside the stated range.
enum class ZRegime { LowT, WeakCoupling, StrongCoupling };

struct AsymptoticZ {
  double value = 0.0;
  bool in_regime = true;
};

AsymptoticZ qao_asymptotic_z(const QaoParams& p, double beta, ZRegime regime);

}  // namespace qstat
