#pragma once

// Suppression of the off-diagonal density-matrix elements of an electron held
// in a superposition of two positions between the plates.
//
// Exponents are reported as g with D = exp(-alpha * dx^2 * g), dx in units of
// L. The coupling q(t) = -e f(t) can be switched on suddenly, adiabatically or
// through an arbitrary profile.

#include <vector>

#include "casdec/field_kernels.hpp"
#include "casdec/units.hpp"

namespace casdec::dec {

using field::Regularization;
using field::SeriesControl;

/// Distance from t to an integer (in units L/c) below which the
/// logarithm is treated as divergent.
inline constexpr double kDivergenceGuard = 1e-9;

struct SuperpositionPair {
  double x = 0.0;
  double x_prime = 0.0;

  double separation() const { return x_prime - x; }
  void validate() const;
};

enum class ProfileKind { sudden, adiabatic, tabulated, smooth_bump };

/// Switching function f(s) of the coupling, s measured from the switch-on.
///   sudden:      f = 1
///   adiabatic:   f = 1 - exp(-s / T)
///   tabulated:   piecewise-linear through (times, values)
///   smooth_bump: sin^2 ramp up over [0, ramp], 1, sin^2 ramp down over the
///                last `ramp` of the window
struct SwitchingProfile {
  ProfileKind kind = ProfileKind::sudden;
  double T = 0.0;  // adiabatic time constant or bump ramp length
  std::vector<double> times;
  std::vector<double> values;

  static SwitchingProfile sudden();
  static SwitchingProfile adiabatic(double T);
  static SwitchingProfile tabulated(std::vector<double> times, std::vector<double> values);
  static SwitchingProfile smooth_bump(double ramp);

  void validate() const;
  /// Checks that the profile is defined on [0, window].
  void require_window(double window) const;
  /// f(s) on a window of length `window` (the bump's fall is anchored to it).
  double value(double s, double window) const;
};

const char* to_string(ProfileKind kind);

struct N2Value {
  double value = 0.0;  // +inf when divergent
  bool divergent = false;
  long m_terms = 0;    // terms summed explicitly before the analytic tail
  double tail = 0.0;   // contribution of the analytic tail
};

/// Sample of a decoherence kernel. `exponent` is g (see above); at a
/// divergence D = 0 and exponent = +inf.
struct DecoherenceSample {
  double t = 0.0;
  double D = 1.0;
  double exponent = 0.0;
  bool divergent = false;
  bool valid = true;  // false outside a documented validity domain
};

struct DecoherenceCurve {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> exponent_values;
  std::vector<bool> divergent;
  SuperpositionPair pair;
  SwitchingProfile profile;
};

/// N2(t) = (2 alpha / pi) sum_m (t / m^3) ln|(m + t)/(m - t)| in the eps -> 0
/// limit.
N2Value n2_closed(double t, const SeriesControl& ctl = {}, const PhysicalConstants& pc = {});

/// Same series summed term by term with an Euler-Maclaurin tail, as it
/// arises from the coherent-state overlap. Used as an independent evaluation
/// of n2_closed.
N2Value n2_coherent(double t, const SeriesControl& ctl = {}, const PhysicalConstants& pc = {});

/// int_0^t dt' N_ob(t') at finite eps.
double n2_inner(double t, const Regularization& reg, const SeriesControl& ctl = {},
                const PhysicalConstants& pc = {});

/// int_0^t dt' int_0^t' dtau N_ob(tau) by adaptive quadrature at finite eps.
double n2_numeric(double t, const Regularization& reg, const SeriesControl& ctl = {},
                  const PhysicalConstants& pc = {});

DecoherenceSample dec_kernel_center(const SuperpositionPair& pair, double t, const SeriesControl& ctl = {},
                                    const PhysicalConstants& pc = {});

/// Same as dec_kernel_center but built from n2_coherent.
DecoherenceSample dec_kernel_coherent(const SuperpositionPair& pair, double t, const SeriesControl& ctl = {},
                                      const PhysicalConstants& pc = {});

/// Gaussian short-time form exp(-4 pi^3 alpha t^2 dx^2 / 90); `valid` is
/// cleared for t > 0.1.
DecoherenceSample dec_kernel_casimir_limit(const SuperpositionPair& pair, double t,
                                           const PhysicalConstants& pc = {});

/// Product over modes of <beta_k | alpha_k>.
std::complex<double> coherent_overlap(const std::vector<std::complex<double>>& alpha_list,
                                      const std::vector<std::complex<double>>& beta_list);

/// Pair at the two plates, x = -1/2, x' = 1/2:
/// (4 alpha / pi) sum_m (t/m^3)[ln|(m+t)/(m-t)| - (1/8) ln|(2m+t)/(2m-t)|].
DecoherenceSample dec_kernel_large(double t, const SeriesControl& ctl = {}, const PhysicalConstants& pc = {});

/// The bracket above summed literally (both logarithms per m). Diverges
/// numerically at every integer t; kept for cross-checks away from them.
double large_exponent_two_term(double t, long m_max);

/// exp(-(2 alpha / pi) zeta(2) dx^2): fully switched-on coupling.
DecoherenceSample dec_kernel_adiabatic(const SuperpositionPair& pair, const PhysicalConstants& pc = {});

/// Large-t limit with ln|(1+m/t)/(1-m/t)| ~ m/t; numerically identical
/// to dec_kernel_adiabatic.
double asymptotic_exponent();

/// Exponent g for an arbitrary switching profile on [0, t], from the cavity
/// mode density in frequency space at finite eps.
double profile_exponent_numeric(const SwitchingProfile& profile, double t, const Regularization& reg);

/// Profile f = 1 - exp(-s/T) evaluated at time t. Requires T < t.
DecoherenceSample dec_kernel_adiabatic_numeric(const SuperpositionPair& pair, double T, double t,
                                               const Regularization& reg, const SeriesControl& ctl = {},
                                               const PhysicalConstants& pc = {});

struct PlateauStats {
  std::vector<double> t_min;      // location of the minimum exponent in (m, m + 1)
  std::vector<double> g_min;      // that minimum
  double mean = 0.0;
  double variation = 0.0;         // (max - min) / mean
  double ratio_to_asymptotic = 0.0;  // mean / asymptotic_exponent()
  double ratio_variation = 0.0;   // (max - min) / mean of g_min / asymptotic_exponent()
};

/// Inter-dip floor of the sudden-switch exponent for every interval (m, m+1)
/// with m_lo <= m < m_hi.
PlateauStats n2_plateau(int m_lo, int m_hi, const SeriesControl& ctl = {});

/// (N2_plateau / 2)(f^2(0) + f^2(T)) with the plateau N2 -> (4 alpha / pi) zeta(2).
double switched_n2(const SwitchingProfile& profile, double T, const SeriesControl& ctl = {},
                   const PhysicalConstants& pc = {});

/// alpha * profile_exponent_numeric: the switched N2 evaluated directly.
double switched_n2_numeric(const SwitchingProfile& profile, double T, const Regularization& reg,
                           const PhysicalConstants& pc = {});

/// D on a time grid (parallel over samples).
DecoherenceCurve center_curve(const SuperpositionPair& pair, const std::vector<double>& times,
                              const SeriesControl& ctl = {}, const PhysicalConstants& pc = {});
DecoherenceCurve large_curve(const std::vector<double>& times, const SeriesControl& ctl = {},
                             const PhysicalConstants& pc = {});

/// Uniform grid 0, dt, 2 dt, ..., up to and including t_max (within dt/2).
std::vector<double> time_grid(double t_max, double dt);

}  // namespace casdec::dec
