#pragma once

// Image charges of an electron between two grounded plates at x = -1/2 and
// x = +1/2 (reduced units, L = 1) and the resulting effective potential.
//
// Energies are returned in units of alpha*hbar*c/L. The divergent
// x-independent part of the image energy is dropped; only the x-dependent part
// is computed.

#include <vector>

#include "casdec/units.hpp"

namespace casdec::images {

/// Positions within this distance of a plate are treated as the pole.
inline constexpr double kPlateGuard = 1e-9;

struct ImageSet {
  std::vector<double> positive_positions;  // -(2n-1) - x and (2n-1) - x
  std::vector<double> negative_positions;  // -2n + x and 2n + x
  int n_max = 0;
  double source_x = 0.0;
};

/// Images with 1 <= n <= n_max, stored as [-(2n-1)-x, (2n-1)-x] pairs in
/// increasing n (same for the negative family).
ImageSet image_positions(double x, int n_max);

enum class Plate { left, right };

/// Electrostatic potential (units e/(4 pi eps0 L)) of the electron plus the
/// truncated image ladder, evaluated on the plate plane at transverse offset
/// `y_offset`. Zero for the complete ladder; the truncation leaves an O(1/n_max)
/// residual.
double boundary_residual(double x, Plate plate, double y_offset, int n_max);

/// Truncated image sum for n = 0..n_max, optionally with an Euler-Maclaurin
/// estimate of the remaining tail.
double potential_series(double x, long n_max, bool tail_correction = true);

/// Closed form (1/2)[H(-1/2 - x) + H(-1/2 + x) + ln 16].
double potential_closed(double x);

/// psi(2n, 1/2) / (2n)!, the coefficient of x^{2n} in the potential.
double taylor_coefficient(int n);

/// Partial Taylor sum with n = 1..n_terms.
double potential_taylor(double x, int n_terms);

struct EffectivePotentialParams {
  double omega = 0.0;  // external trap frequency (units c/L)
  double mass = 1.0;   // electron mass (units hbar/(c L))
  int taylor_order = 2;
  PhysicalConstants constants{};

  void validate() const;
};

/// Omega_eff = sqrt(Omega^2 + alpha psi(2, 1/2) / m). Throws InstabilityError
/// when the radicand is not positive.
double effective_frequency(const EffectivePotentialParams& params);

}  // namespace casdec::images
