#include "casdec/decoherence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "casdec/errors.hpp"
#include "casdec/parallel.hpp"
#include "casdec/quadrature.hpp"
#include "casdec/specfun.hpp"

namespace casdec::dec {
namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("time must be finite and >= 0, got " + std::to_string(t));
}

bool near_integer(double t, bool odd_only) {
  const double m = std::round(t);
  if (m < 1.0 || std::abs(t - m) >= kDivergenceGuard) return false;
  return !odd_only || std::fmod(m, 2.0) == 1.0;
}

// ln|(m + t)/(m - t)| for m > 0, t >= 0
double log_ratio(double m, double t) { return std::log((m + t) / std::abs(m - t)); }

struct SeriesSum {
  double value = 0.0;
  double tail = 0.0;
  long terms = 0;
  bool divergent = false;
};

// sum over m >= 1 (all m, or odd m only) of (t/m^3) ln|(m+t)/(m-t)|. Beyond
// the explicit range the logarithm is expanded, 2 sum_k (t/m)^{2k+1}/(2k+1),
// and each power of 1/m is summed with a Hurwitz zeta tail.
SeriesSum log_series(double t, const SeriesControl& ctl, bool odd_only) {
  ctl.validate();
  require_time(t);
  SeriesSum out;
  if (t == 0.0) return out;
  if (near_integer(t, odd_only)) {
    out.divergent = true;
    out.value = kInf;
    return out;
  }
  long direct = 16 + static_cast<long>(std::ceil(4.0 * t));
  if (direct % 2 == 1) ++direct;
  if (direct > ctl.m_max) {
    throw ConfigError("m_max = " + std::to_string(ctl.m_max) + " too small for ct/L = " + std::to_string(t) +
                      " (need at least " + std::to_string(direct) + ")");
  }
  const long step = odd_only ? 2 : 1;
  const long first = direct - (odd_only ? 1 : 0);
  double sum = 0.0;
  for (long m = first; m >= 1; m -= step) {
    const double md = static_cast<double>(m);
    sum += t / (md * md * md) * log_ratio(md, t);
  }
  const double t2 = t * t;
  double tpow = t2;  // t^{2k+2}
  double tail = 0.0;
  const double bound_ratio = t2 / (static_cast<double>(direct) * static_cast<double>(direct));
  double bound = 1.0;
  for (int k = 0; k < 60; ++k) {
    const double s = 2.0 * k + 4.0;
    const double zeta = odd_only ? std::pow(2.0, -s) * specfun::hurwitz_zeta(s, 0.5 * static_cast<double>(direct + 1))
                                 : specfun::zeta_tail(s, direct);
    tail += 2.0 * tpow / (2.0 * k + 1.0) * zeta;
    tpow *= t2;
    bound *= bound_ratio;
    if (bound < 1e-18) break;
  }
  out.value = sum + tail;
  out.tail = tail;
  out.terms = direct;
  return out;
}

N2Value to_n2(const SeriesSum& s, double prefactor) {
  N2Value v;
  v.divergent = s.divergent;
  v.value = s.divergent ? kInf : prefactor * s.value;
  v.tail = prefactor * s.tail;
  v.m_terms = s.terms;
  return v;
}

DecoherenceSample sample_from_exponent(double t, double g, double dx2, double alpha, bool divergent) {
  DecoherenceSample s;
  s.t = t;
  s.divergent = divergent;
  s.exponent = divergent ? kInf : g;
  if (dx2 == 0.0) {
    s.D = 1.0;
  } else if (divergent) {
    s.D = 0.0;
  } else {
    s.D = std::exp(-alpha * dx2 * g);
  }
  return s;
}

// Integral of f(tau) over [a, b] with breakpoints at the kernel spikes tau = m
// and geometric refinement around them on the scale eps.
template <class F>
double integrate_with_spikes(F&& f, double a, double b, double eps, const char* what) {
  std::vector<double> cuts{a, b};
  for (double m = std::max(1.0, std::floor(a)); m <= std::ceil(b); m += 1.0) {
    for (double w = eps; w < 0.25; w *= 4.0) {
      cuts.push_back(m - w);
      cuts.push_back(m + w);
    }
    cuts.push_back(m);
  }
  std::erase_if(cuts, [&](double c) { return c < a || c > b; });
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0, error = 0.0, scale = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double err = 0.0, l1 = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, cuts[i], cuts[i + 1], 15, 1e-12,
                                                                            &err, &l1);
    error += err;
    scale += l1;
  }
  if (error > 1e-9 * scale + 1e-15) {
    throw NumericalError(std::string(what) + ": quadrature did not converge on [" + std::to_string(a) + ", " +
                         std::to_string(b) + "], error estimate " + std::to_string(error) + " vs L1 norm " +
                         std::to_string(scale) + " (eps = " + std::to_string(eps) + ")");
  }
  return total;
}

// k K(k): cavity-minus-free spectral weight of the x field at the centre. The
// modes with transverse threshold 2 pi j, |j| <= J, are open at wavenumber k.
double mode_density(double k) {
  const double J = std::floor(k / (2.0 * kPi));
  const double r = 2.0 * kPi / k;
  const double open = 2.0 * J + 1.0;
  const double reduction = J == 0.0 ? 0.0 : r * r * J * (J + 1.0) * open / 3.0;
  return kPi * (open - reduction) - 2.0 * k / 3.0;
}

// (e^{z t} - 1) / z, stable at small |z t|
cplx phi(cplx z, double t) {
  const cplx zt = z * t;
  if (std::abs(zt) < 1e-4) return t * (1.0 + zt / 2.0 + zt * zt / 6.0);
  return (std::exp(zt) - 1.0) / z;
}

// (e^{i k h} - 1) / (i k) = h e^{i k h / 2} sinc(k h / 2)
cplx segment_phase(double k, double s0, double h) {
  const double x = 0.5 * k * h;
  const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
  return std::exp(cplx(0.0, k * (s0 + 0.5 * h))) * h * sinc;
}

// k F(k) with F(k) = int_0^t f(s) e^{i k s} ds
cplx k_times_transform(const SwitchingProfile& p, double k, double t) {
  const cplx I(0.0, 1.0);
  switch (p.kind) {
    case ProfileKind::sudden:
      return -I * (std::exp(I * (k * t)) - 1.0);
    case ProfileKind::adiabatic:
      return k * (phi(I * k, t) - phi(cplx(-1.0 / p.T, k), t));
    case ProfileKind::smooth_bump: {
      const double a = kPi / p.T;
      // int_0^ramp sin(a s) e^{i k s} ds
      cplx ramp;
      if (std::abs(k - a) < 1e-9 * a) {
        ramp = I * (p.T / 2.0);
      } else {
        ramp = a * (1.0 + std::exp(I * (k * p.T))) / (a * a - k * k);
      }
      return I * (a / 2.0) * ramp * (1.0 - std::exp(I * (k * (t - p.T))));
    }
    case ProfileKind::tabulated: {
      // k F = -i [f(t) e^{ikt} - f(0)] + i sum_seg slope * int_seg e^{iks} ds
      const double f0 = p.value(0.0, t);
      const double ft = p.value(t, t);
      cplx sum = 0.0;
      for (std::size_t i = 0; i + 1 < p.times.size(); ++i) {
        const double s0 = std::max(0.0, p.times[i]);
        const double s1 = std::min(t, p.times[i + 1]);
        if (s1 <= s0) continue;
        const double slope = (p.values[i + 1] - p.values[i]) / (p.times[i + 1] - p.times[i]);
        sum += slope * segment_phase(k, s0, s1 - s0);
      }
      return -I * (ft * std::exp(I * (k * t)) - f0) + I * sum;
    }
  }
  return 0.0;
}

}  // namespace

void SuperpositionPair::validate() const {
  if (!CavityConfig::contains(x) || !CavityConfig::contains(x_prime)) {
    throw GeometryError("superposition positions must lie in [-1/2, 1/2], got x = " + std::to_string(x) +
                        ", x' = " + std::to_string(x_prime));
  }
}

SwitchingProfile SwitchingProfile::sudden() { return {}; }

SwitchingProfile SwitchingProfile::adiabatic(double T) {
  SwitchingProfile p;
  p.kind = ProfileKind::adiabatic;
  p.T = T;
  p.validate();
  return p;
}

SwitchingProfile SwitchingProfile::tabulated(std::vector<double> times, std::vector<double> values) {
  SwitchingProfile p;
  p.kind = ProfileKind::tabulated;
  p.times = std::move(times);
  p.values = std::move(values);
  p.validate();
  return p;
}

SwitchingProfile SwitchingProfile::smooth_bump(double ramp) {
  SwitchingProfile p;
  p.kind = ProfileKind::smooth_bump;
  p.T = ramp;
  p.validate();
  return p;
}

void SwitchingProfile::validate() const {
  switch (kind) {
    case ProfileKind::sudden: break;
    case ProfileKind::adiabatic:
    case ProfileKind::smooth_bump:
      if (!(T > 0.0) || !std::isfinite(T)) throw InputError(std::string(to_string(kind)) + " profile needs T > 0");
      break;
    case ProfileKind::tabulated:
      if (times.size() < 2 || times.size() != values.size()) {
        throw InputError("tabulated profile needs >= 2 samples with matching times and values");
      }
      for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || !(values[i] >= 0.0 && values[i] <= 1.0)) {
          throw InputError("tabulated profile values must lie in [0, 1]");
        }
        if (i > 0 && !(times[i] > times[i - 1])) throw InputError("tabulated profile times must increase");
      }
      break;
  }
}

void SwitchingProfile::require_window(double window) const {
  validate();
  if (!(window > 0.0)) throw InputError("switching window must be positive");
  if (kind == ProfileKind::tabulated && (times.front() > 0.0 || times.back() < window)) {
    throw InputError("tabulated profile covers [" + std::to_string(times.front()) + ", " +
                     std::to_string(times.back()) + "], not [0, " + std::to_string(window) + "]");
  }
  if (kind == ProfileKind::smooth_bump && 2.0 * T > window) {
    throw InputError("smooth bump ramps (2 x " + std::to_string(T) + ") do not fit in the window " +
                     std::to_string(window));
  }
}

double SwitchingProfile::value(double s, double window) const {
  switch (kind) {
    case ProfileKind::sudden: return 1.0;
    case ProfileKind::adiabatic: return s <= 0.0 ? 0.0 : -std::expm1(-s / T);
    case ProfileKind::smooth_bump: {
      if (s <= 0.0 || s >= window) return 0.0;
      const double edge = std::min(s, window - s);
      if (edge >= T) return 1.0;
      const double v = std::sin(0.5 * kPi * edge / T);
      return v * v;
    }
    case ProfileKind::tabulated: {
      if (s <= times.front()) return values.front();
      if (s >= times.back()) return values.back();
      const auto it = std::upper_bound(times.begin(), times.end(), s);
      const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
      const double w = (s - times[i]) / (times[i + 1] - times[i]);
      return values[i] + w * (values[i + 1] - values[i]);
    }
  }
  return 0.0;
}

const char* to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::sudden: return "sudden";
    case ProfileKind::adiabatic: return "adiabatic";
    case ProfileKind::tabulated: return "tabulated";
    case ProfileKind::smooth_bump: return "smooth_bump";
  }
  return "unknown";
}

N2Value n2_closed(double t, const SeriesControl& ctl, const PhysicalConstants& pc) {
  pc.validate();
  return to_n2(log_series(t, ctl, false), 2.0 * pc.alpha / kPi);
}

N2Value n2_coherent(double t, const SeriesControl& ctl, const PhysicalConstants& pc) {
  ctl.validate();
  pc.validate();
  require_time(t);
  N2Value v;
  if (t == 0.0) return v;
  if (near_integer(t, false)) {
    v.divergent = true;
    v.value = kInf;
    return v;
  }
  const long M = ctl.m_max;
  if (static_cast<double>(M) < 2.0 * t) {
    throw ConfigError("m_max = " + std::to_string(M) + " must exceed 2 ct/L = " + std::to_string(2.0 * t));
  }
  double sum = 0.0;
  for (long m = M; m >= 1; --m) {
    const double md = static_cast<double>(m);
    sum += t / (md * md * md) * log_ratio(md, t);
  }
  // Euler-Maclaurin: sum_{m > M} f = int_M^inf f - f(M)/2 - f'(M)/12, with
  // int_M^inf f = (1/t)[((u^2 - 1)/2) ln((1+u)/(1-u)) + u], u = t/M
  const double md = static_cast<double>(M);
  const double u = t / md;
  const double integral = (0.5 * (u * u - 1.0) * 2.0 * std::atanh(u) + u) / t;
  const double f_M = t / (md * md * md) * log_ratio(md, t);
  const double df_M = -8.0 * t * t / std::pow(md, 5);
  const double tail = integral - 0.5 * f_M - df_M / 12.0;
  const double pref = 2.0 * pc.alpha / kPi;
  v.value = pref * (sum + tail);
  v.tail = pref * tail;
  v.m_terms = M;
  return v;
}

double n2_inner(double t, const Regularization& reg, const SeriesControl& ctl, const PhysicalConstants& pc) {
  reg.validate();
  require_time(t);
  if (t == 0.0) return 0.0;
  const auto f = [&](double tau) { return field::noise_kernel_observable(tau, reg, ctl, pc).value; };
  return integrate_with_spikes(f, 0.0, t, reg.epsilon, "n2_inner");
}

double n2_numeric(double t, const Regularization& reg, const SeriesControl& ctl, const PhysicalConstants& pc) {
  reg.validate();
  require_time(t);
  if (t == 0.0) return 0.0;
  // int_0^t dt' int_0^t' dtau N(tau) = int_0^t (t - tau) N(tau) dtau
  const auto f = [&](double tau) { return (t - tau) * field::noise_kernel_observable(tau, reg, ctl, pc).value; };
  return integrate_with_spikes(f, 0.0, t, reg.epsilon, "n2_numeric");
}

DecoherenceSample dec_kernel_center(const SuperpositionPair& pair, double t, const SeriesControl& ctl,
                                    const PhysicalConstants& pc) {
  pair.validate();
  pc.validate();
  const SeriesSum s = log_series(t, ctl, false);
  const double dx = pair.separation();
  return sample_from_exponent(t, 2.0 / kPi * s.value, dx * dx, pc.alpha, s.divergent);
}

DecoherenceSample dec_kernel_coherent(const SuperpositionPair& pair, double t, const SeriesControl& ctl,
                                      const PhysicalConstants& pc) {
  pair.validate();
  const N2Value n = n2_coherent(t, ctl, pc);
  const double dx = pair.separation();
  return sample_from_exponent(t, n.value / pc.alpha, dx * dx, pc.alpha, n.divergent);
}

DecoherenceSample dec_kernel_casimir_limit(const SuperpositionPair& pair, double t, const PhysicalConstants& pc) {
  pair.validate();
  pc.validate();
  require_time(t);
  const double dx = pair.separation();
  DecoherenceSample s = sample_from_exponent(t, 4.0 * kPi * kPi * kPi * t * t / 90.0, dx * dx, pc.alpha, false);
  s.valid = t <= 0.1;
  return s;
}

std::complex<double> coherent_overlap(const std::vector<std::complex<double>>& alpha_list,
                                      const std::vector<std::complex<double>>& beta_list) {
  if (alpha_list.size() != beta_list.size()) {
    throw InputError("coherent_overlap: " + std::to_string(alpha_list.size()) + " vs " +
                     std::to_string(beta_list.size()) + " mode amplitudes");
  }
  cplx exponent = 0.0;
  for (std::size_t i = 0; i < alpha_list.size(); ++i) {
    const cplx a = alpha_list[i];
    const cplx b = beta_list[i];
    exponent += -0.5 * (std::norm(b) + std::norm(a) - 2.0 * std::conj(b) * a);
  }
  return std::exp(exponent);
}

DecoherenceSample dec_kernel_large(double t, const SeriesControl& ctl, const PhysicalConstants& pc) {
  pc.validate();
  // m = 2j of the L-comb equals m = j of the 2L-comb, so only odd m remain
  const SeriesSum s = log_series(t, ctl, true);
  return sample_from_exponent(t, 4.0 / kPi * s.value, 1.0, pc.alpha, s.divergent);
}

double large_exponent_two_term(double t, long m_max) {
  require_time(t);
  if (m_max < 1) throw ConfigError("m_max must be positive");
  double sum = 0.0;
  for (long m = m_max; m >= 1; --m) {
    const double md = static_cast<double>(m);
    sum += t / (md * md * md) * (log_ratio(md, t) - log_ratio(2.0 * md, t) / 8.0);
  }
  return 4.0 / kPi * sum;
}

DecoherenceSample dec_kernel_adiabatic(const SuperpositionPair& pair, const PhysicalConstants& pc) {
  pair.validate();
  pc.validate();
  const double dx = pair.separation();
  return sample_from_exponent(0.0, 2.0 / kPi * specfun::zeta_int(2), dx * dx, pc.alpha, false);
}

double asymptotic_exponent() { return 2.0 / kPi * specfun::zeta_int(2); }

double profile_exponent_numeric(const SwitchingProfile& profile, double t, const Regularization& reg) {
  reg.validate();
  profile.require_window(t);
  double k_hi = 40.0 / reg.epsilon;
  double h = kPi / (2.0 * t);
  if (profile.kind == ProfileKind::smooth_bump) {
    k_hi = std::min(k_hi, 1000.0 * kPi / profile.T);
  }
  if (profile.kind == ProfileKind::adiabatic) h = std::min(h, 0.25 / profile.T);
  const auto& rule = quad::gauss_legendre(10);
  const auto integrand = [&](double k) {
    return mode_density(k) * std::norm(k_times_transform(profile, k, t)) * std::exp(-reg.epsilon * k);
  };
  // panels never straddle a mode threshold 2 pi j, where K(k) has a kink
  const std::size_t n_bands = static_cast<std::size_t>(std::ceil(k_hi / (2.0 * kPi)));
  std::vector<double> partial(n_bands, 0.0);
  parallel_for(n_bands, [&](std::size_t j) {
    const double lo = 2.0 * kPi * static_cast<double>(j);
    const double hi = std::min(k_hi, lo + 2.0 * kPi);
    const long panels = std::max(1L, static_cast<long>(std::ceil((hi - lo) / h)));
    const double w = (hi - lo) / static_cast<double>(panels);
    double sum = 0.0;
    for (long p = 0; p < panels; ++p) {
      const double a = lo + w * static_cast<double>(p);
      sum += rule.integrate(integrand, a, a + w);
    }
    partial[j] = sum;
  });
  double total = 0.0;
  for (auto it = partial.rbegin(); it != partial.rend(); ++it) total += *it;
  return total / (2.0 * kPi);
}

DecoherenceSample dec_kernel_adiabatic_numeric(const SuperpositionPair& pair, double T, double t,
                                               const Regularization& reg, const SeriesControl& ctl,
                                               const PhysicalConstants& pc) {
  pair.validate();
  pc.validate();
  ctl.validate();
  require_time(t);
  if (!(T > 0.0)) throw InputError("switch-on time T must be positive");
  if (!(T < t)) {
    throw InputError("limit ordering requires T < t (T = " + std::to_string(T) + ", t = " + std::to_string(t) + ")");
  }
  const double g = profile_exponent_numeric(SwitchingProfile::adiabatic(T), t, reg);
  const double dx = pair.separation();
  return sample_from_exponent(t, g, dx * dx, pc.alpha, false);
}

PlateauStats n2_plateau(int m_lo, int m_hi, const SeriesControl& ctl) {
  if (m_lo < 1 || m_hi <= m_lo) throw InputError("plateau needs 1 <= m_lo < m_hi");
  PlateauStats st;
  const double pref = 2.0 / kPi;
  for (int m = m_lo; m < m_hi; ++m) {
    const auto g = [&](double t) { return pref * log_series(t, ctl, false).value; };
    const auto r = boost::math::tools::brent_find_minima(g, m + 1e-6, m + 1.0 - 1e-6, 50);
    st.t_min.push_back(r.first);
    st.g_min.push_back(r.second);
  }
  const auto [lo, hi] = std::minmax_element(st.g_min.begin(), st.g_min.end());
  double sum = 0.0;
  for (double g : st.g_min) sum += g;
  st.mean = sum / static_cast<double>(st.g_min.size());
  st.variation = (*hi - *lo) / st.mean;
  st.ratio_to_asymptotic = st.mean / asymptotic_exponent();
  st.ratio_variation = st.variation;  // the asymptotic form is t-independent
  return st;
}

double switched_n2(const SwitchingProfile& profile, double T, const SeriesControl& ctl, const PhysicalConstants& pc) {
  ctl.validate();
  pc.validate();
  profile.require_window(T);
  const double plateau = 4.0 * pc.alpha / kPi * specfun::zeta_int(2);
  const double f0 = profile.value(0.0, T);
  const double fT = profile.value(T, T);
  return 0.5 * plateau * (f0 * f0 + fT * fT);
}

double switched_n2_numeric(const SwitchingProfile& profile, double T, const Regularization& reg,
                           const PhysicalConstants& pc) {
  pc.validate();
  return pc.alpha * profile_exponent_numeric(profile, T, reg);
}

namespace {

template <class Eval>
DecoherenceCurve sweep(const std::vector<double>& times, Eval&& eval) {
  DecoherenceCurve c;
  c.times = times;
  std::vector<DecoherenceSample> out(times.size());
  parallel_for(times.size(), [&](std::size_t i) { out[i] = eval(times[i]); });
  for (const auto& s : out) {
    c.values.push_back(s.D);
    c.exponent_values.push_back(s.exponent);
    c.divergent.push_back(s.divergent);
  }
  return c;
}

}  // namespace

DecoherenceCurve center_curve(const SuperpositionPair& pair, const std::vector<double>& times,
                              const SeriesControl& ctl, const PhysicalConstants& pc) {
  pair.validate();
  DecoherenceCurve c = sweep(times, [&](double t) { return dec_kernel_center(pair, t, ctl, pc); });
  c.pair = pair;
  return c;
}

DecoherenceCurve large_curve(const std::vector<double>& times, const SeriesControl& ctl, const PhysicalConstants& pc) {
  DecoherenceCurve c = sweep(times, [&](double t) { return dec_kernel_large(t, ctl, pc); });
  c.pair = SuperpositionPair{-0.5, 0.5};
  return c;
}

std::vector<double> time_grid(double t_max, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("time step must be positive");
  require_time(t_max);
  const long n = static_cast<long>(std::floor(t_max / dt + 0.5));
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(n) + 1);
  for (long i = 0; i <= n; ++i) times.push_back(static_cast<double>(i) * dt);
  return times;
}

}  // namespace casdec::dec
