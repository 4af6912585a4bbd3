#pragma once

// Vacuum two-point function of the x-polarised field between the plates and
// the noise kernels built from it.
//
// Two independent routes are provided:
//   * two_point_mode_sum: explicit sum over cavity modes n with a numerical
//     transverse-momentum integral, cutoff factor exp(-k / k_max);
//   * the image (Dirac-comb) resummation, a sum over m of
//     1 / (m^2 - (tau - i eps)^2)^2.
// All quantities are in reduced units (hbar = c = eps0 = 1, L = 1). The
// transverse separation of the two points is zero throughout.

#include <complex>

#include "casdec/units.hpp"

namespace casdec::field {

/// UV cutoff: epsilon = 1 / (k_max c), in units of L/c.
struct Regularization {
  double epsilon = 1e-3;

  static Regularization from_k_max(double k_max);
  double k_max() const { return 1.0 / epsilon; }
  void validate() const;
};

/// Truncation and tolerance policy for the infinite sums.
struct SeriesControl {
  long m_max = 10000;  // image-sum truncation
  long n_max = 0;      // cavity-mode truncation; 0 selects ceil(20 / (pi eps))
  int k_quad = 20;     // Gauss nodes per quadrature panel
  double abs_tol = 1e-14;
  double rel_tol = 1e-10;

  void validate() const;
  long cavity_modes(const Regularization& reg) const;
};

/// Kernel evaluations within this many epsilons of c tau = m L are flagged.
inline constexpr double kSingularBand = 5.0;

struct KernelSample {
  double tau = 0.0;
  double value = 0.0;
  double imag_residue = 0.0;  // |Im| left over after adding the Hermitian conjugate
  bool near_singular = false;
  double epsilon = 0.0;
  long m_terms = 0;           // image terms summed explicitly (the rest is an asymptotic tail)
};

struct TwoPointSample {
  std::complex<double> value;
  bool accuracy_warning = false;  // n_max * pi * eps < 20
  long modes = 0;
};

/// <0| Pi^x(x1, t1) Pi^x(x2, t2) |0> from the cavity mode expansion,
/// tau = t1 - t2 >= 0.
TwoPointSample two_point_mode_sum(double x1, double x2, double tau, const Regularization& reg,
                                  const SeriesControl& ctl);

/// Image-resummed two-point function for the pair at the cavity centre:
/// (1/pi^2) sum_{m in Z} 1/(m^2 - z^2)^2 with z = tau - i eps.
std::complex<double> two_point_center(double tau, const Regularization& reg, const SeriesControl& ctl);

/// Image-resummed two-point function between x = -1/2 and x = +1/2.
std::complex<double> two_point_plates(double tau, const Regularization& reg, const SeriesControl& ctl);

/// (e^2 / 2) <{Pi, Pi}> from a two-point value (adds the Hermitian conjugate).
double noise_from_two_point(std::complex<double> two_point, const PhysicalConstants& pc = {});

/// Full kernel, sum over all m in Z.
KernelSample noise_kernel_total(double tau, const Regularization& reg, const SeriesControl& ctl,
                                const PhysicalConstants& pc = {});

/// m = 0 term alone: the empty-space kernel.
KernelSample noise_kernel_empty(double tau, const Regularization& reg, const PhysicalConstants& pc = {});

/// Plate-induced part: total minus the m = 0 term.
KernelSample noise_kernel_observable(double tau, const Regularization& reg, const SeriesControl& ctl,
                                     const PhysicalConstants& pc = {});

/// c tau << L limit of the observable kernel, 8 pi^3 alpha / 90.
double noise_kernel_casimir(const PhysicalConstants& pc = {});

/// Casimir energy density pi^2 / 720 in units hbar c / L^4.
double casimir_energy_density();

enum class LargeSepPart { full, l_comb, two_l_comb };

/// Kernel for the pair x = -1/2, x' = +1/2: twice the L-comb sum minus twice
/// the 2L-comb sum (each over all m in Z). The m = 0 terms of the two combs
/// cancel.
KernelSample noise_kernel_large_sep(double tau, const Regularization& reg, const SeriesControl& ctl,
                                    const PhysicalConstants& pc = {}, LargeSepPart part = LargeSepPart::full);

struct CombResidual {
  double even = 0.0;         // sum over even n of delta_n  vs  (1/2pi) sum_m e^{i m k}
  double alternating = 0.0;  // sum of (-1)^n delta_n  vs  2 even-comb - full comb
};

/// Applies both sides of the comb identities to exp(-k^2 / (2 width^2)),
/// truncating at n_max (cavity side) and m_max (image side).
CombResidual comb_resum_check(double test_width, const SeriesControl& ctl);

}  // namespace casdec::field
