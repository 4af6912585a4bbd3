#include "casdec/field_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "casdec/errors.hpp"
#include "casdec/quadrature.hpp"
#include "casdec/specfun.hpp"

namespace casdec::field {
namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// sum_{m >= 1} 1 / (m^2 - z^2)^2. The first `direct` terms are summed
// explicitly; the remainder uses (1 - w)^{-2} = sum_k (k+1) w^k with
// w = z^2/m^2 and Hurwitz-zeta tails.
cplx image_sum(cplx z, long m_max, long* terms_used) {
  const double mag = std::abs(z);
  const long direct = 32 + static_cast<long>(std::ceil(8.0 * mag));
  if (direct > m_max) {
    throw ConfigError("m_max = " + std::to_string(m_max) + " too small for |c tau| = " + std::to_string(mag) +
                      " (need at least " + std::to_string(direct) + ")");
  }
  const cplx z2 = z * z;
  cplx sum = 0.0;
  for (long m = direct; m >= 1; --m) {
    const cplx d = static_cast<double>(m) * static_cast<double>(m) - z2;
    sum += 1.0 / (d * d);
  }
  cplx zpow = 1.0;
  const double ratio2 = (mag / static_cast<double>(direct)) * (mag / static_cast<double>(direct));
  double bound = 1.0;
  for (int k = 0; k < 40; ++k) {
    sum += static_cast<double>(k + 1) * zpow * specfun::zeta_tail(4.0 + 2.0 * k, direct);
    zpow *= z2;
    bound *= ratio2;
    if (bound < 1e-18) break;
  }
  if (terms_used) *terms_used = direct;
  return sum;
}

// (1/pi^2) sum_{m in Z} 1/((s m)^2 - z^2)^2 for comb spacing s.
cplx comb_two_point(cplx z, double spacing, long m_max, long* terms) {
  const cplx z_scaled = z / spacing;
  const double s4 = spacing * spacing * spacing * spacing;
  const cplx z4 = z * z * z * z;
  return (1.0 / z4 + 2.0 * image_sum(z_scaled, m_max, terms) / s4) / (kPi * kPi);
}

double nearest_distance(double tau, long stride, long offset) {
  // distance from |tau| to the nearest integer of the form stride*j + offset, j >= 0
  const double a = std::abs(tau);
  const double j = std::round((a - static_cast<double>(offset)) / static_cast<double>(stride));
  const double j_clamped = std::max(0.0, j);
  return std::abs(a - (static_cast<double>(stride) * j_clamped + static_cast<double>(offset)));
}

bool in_band(double distance, const Regularization& reg) { return distance < kSingularBand * reg.epsilon; }

// Phase-exact cos(n pi s) for s = x + 1/2, so dyadic positions map to exact 0 and +-1.
double mode_weight(long n, double s) {
  double r = std::fmod(static_cast<double>(n) * s, 2.0);
  if (r < 0) r += 2.0;
  if (r == 0.0) return 1.0;
  if (r == 1.0) return -1.0;
  if (r == 0.5 || r == 1.5) return 0.0;
  return std::cos(kPi * r);
}

// int_q^inf (w^2 - q^2) exp(-a w) dw by panel Gauss-Legendre, a = eps + i tau.
cplx transverse_integral(double q, double tau, double eps, const quad::GaussLegendre& rule) {
  const cplx a(eps, tau);
  const double span = 50.0 / eps;
  const double width = 0.5 * std::min(1.0 / eps, std::abs(tau) > 0 ? kPi / std::abs(tau) : 1.0 / eps);
  const long panels = static_cast<long>(std::ceil(span / width));
  const double h = span / static_cast<double>(panels);
  cplx total = 0.0;
  for (long p = panels - 1; p >= 0; --p) {
    const double lo = q + h * static_cast<double>(p);
    total += rule.integrate([&](double w) { return (w * w - q * q) * std::exp(-a * w); }, lo, lo + h);
  }
  return total;
}

}  // namespace

Regularization Regularization::from_k_max(double k_max) {
  if (!(k_max > 0.0)) throw ConfigError("k_max must be positive");
  return Regularization{1.0 / k_max};
}

void Regularization::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ConfigError("regularization epsilon must be positive, got " + std::to_string(epsilon));
  }
}

void SeriesControl::validate() const {
  if (m_max < 1) throw ConfigError("m_max must be positive");
  if (n_max < 0) throw ConfigError("n_max must be >= 0 (0 = automatic)");
  if (k_quad < 2) throw ConfigError("k_quad must be >= 2");
  if (!(abs_tol > 0.0)) throw ConfigError("abs_tol must be positive");
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw ConfigError("rel_tol must lie in (0, 1)");
}

long SeriesControl::cavity_modes(const Regularization& reg) const {
  if (n_max > 0) return n_max;
  return static_cast<long>(std::ceil(20.0 / (kPi * reg.epsilon)));
}

TwoPointSample two_point_mode_sum(double x1, double x2, double tau, const Regularization& reg,
                                  const SeriesControl& ctl) {
  reg.validate();
  ctl.validate();
  if (!CavityConfig::contains(x1) || !CavityConfig::contains(x2)) {
    throw GeometryError("mode-sum points must lie in [-1/2, 1/2]");
  }
  if (tau < 0) throw InputError("two_point_mode_sum requires tau >= 0");
  const long n_max = ctl.cavity_modes(reg);
  const auto& rule = quad::gauss_legendre(ctl.k_quad);

  // quadrature self-check on the n = 0 mode against a finer rule
  {
    const cplx coarse = transverse_integral(0.0, tau, reg.epsilon, rule);
    const cplx fine = transverse_integral(0.0, tau, reg.epsilon, quad::gauss_legendre(ctl.k_quad + 10));
    if (std::abs(coarse - fine) > 1e-8 * std::abs(fine) + ctl.abs_tol) {
      throw NumericalError("transverse quadrature not converged at tau = " + std::to_string(tau) +
                           ": |difference| = " + std::to_string(std::abs(coarse - fine)));
    }
  }

  const double s1 = x1 + 0.5;
  const double s2 = x2 + 0.5;
  cplx sum = 0.0;
  for (long n = n_max; n >= 0; --n) {
    const double w = mode_weight(n, s1) * mode_weight(n, s2);
    if (w == 0.0) continue;
    const double multiplicity = n == 0 ? 1.0 : 2.0;  // n and -n
    sum += multiplicity * w * transverse_integral(kPi * static_cast<double>(n), tau, reg.epsilon, rule);
  }
  TwoPointSample out;
  out.value = sum / (4.0 * kPi);
  out.modes = n_max;
  out.accuracy_warning = static_cast<double>(n_max) * kPi * reg.epsilon < 20.0;
  return out;
}

std::complex<double> two_point_center(double tau, const Regularization& reg, const SeriesControl& ctl) {
  reg.validate();
  ctl.validate();
  return comb_two_point(cplx(tau, -reg.epsilon), 1.0, ctl.m_max, nullptr);
}

std::complex<double> two_point_plates(double tau, const Regularization& reg, const SeriesControl& ctl) {
  reg.validate();
  ctl.validate();
  const cplx z(tau, -reg.epsilon);
  return 2.0 * comb_two_point(z, 1.0, ctl.m_max, nullptr) - 2.0 * comb_two_point(z, 2.0, ctl.m_max, nullptr);
}

double noise_from_two_point(std::complex<double> two_point, const PhysicalConstants& pc) {
  return 0.5 * pc.charge_squared() * (two_point + std::conj(two_point)).real();
}

KernelSample noise_kernel_total(double tau, const Regularization& reg, const SeriesControl& ctl,
                                const PhysicalConstants& pc) {
  reg.validate();
  ctl.validate();
  KernelSample s;
  s.tau = tau;
  s.epsilon = reg.epsilon;
  // anticommutator: W(tau) + W(-tau)
  const cplx sym = comb_two_point(cplx(tau, -reg.epsilon), 1.0, ctl.m_max, &s.m_terms) +
                   comb_two_point(cplx(-tau, -reg.epsilon), 1.0, ctl.m_max, nullptr);
  s.value = 0.5 * pc.charge_squared() * sym.real();
  s.imag_residue = 0.5 * pc.charge_squared() * std::abs(sym.imag());
  s.near_singular = in_band(nearest_distance(tau, 1, 0), reg);
  return s;
}

KernelSample noise_kernel_empty(double tau, const Regularization& reg, const PhysicalConstants& pc) {
  reg.validate();
  KernelSample s;
  s.tau = tau;
  s.epsilon = reg.epsilon;
  const auto term = [](cplx z) { return 1.0 / (z * z * z * z * kPi * kPi); };
  const cplx sym = term(cplx(tau, -reg.epsilon)) + term(cplx(-tau, -reg.epsilon));
  s.value = 0.5 * pc.charge_squared() * sym.real();
  s.imag_residue = 0.5 * pc.charge_squared() * std::abs(sym.imag());
  s.near_singular = in_band(std::abs(tau), reg);
  return s;
}

KernelSample noise_kernel_observable(double tau, const Regularization& reg, const SeriesControl& ctl,
                                     const PhysicalConstants& pc) {
  reg.validate();
  ctl.validate();
  KernelSample s;
  s.tau = tau;
  s.epsilon = reg.epsilon;
  // (1/pi^2) * 2 * sum_{m >= 1}, symmetrised over +-tau
  const cplx sym = image_sum(cplx(tau, -reg.epsilon), ctl.m_max, &s.m_terms) +
                   image_sum(cplx(-tau, -reg.epsilon), ctl.m_max, nullptr);
  const double scale = 0.5 * pc.charge_squared() * 2.0 / (kPi * kPi);
  s.value = scale * sym.real();
  s.imag_residue = scale * std::abs(sym.imag());
  s.near_singular = std::abs(tau) > 0.5 && in_band(nearest_distance(tau, 1, 1), reg);
  return s;
}

double noise_kernel_casimir(const PhysicalConstants& pc) {
  // (16 e^2 / (hbar eps0)) * (pi^2 hbar c / (720 L^4))
  return 16.0 * pc.charge_squared() * casimir_energy_density();
}

double casimir_energy_density() { return kPi * kPi / 720.0; }

KernelSample noise_kernel_large_sep(double tau, const Regularization& reg, const SeriesControl& ctl,
                                    const PhysicalConstants& pc, LargeSepPart part) {
  reg.validate();
  ctl.validate();
  KernelSample s;
  s.tau = tau;
  s.epsilon = reg.epsilon;
  const cplx zp(tau, -reg.epsilon);
  const cplx zm(-tau, -reg.epsilon);
  cplx sym = 0.0;
  if (part != LargeSepPart::two_l_comb) {
    sym += 2.0 * (comb_two_point(zp, 1.0, ctl.m_max, &s.m_terms) + comb_two_point(zm, 1.0, ctl.m_max, nullptr));
  }
  if (part != LargeSepPart::l_comb) {
    sym -= 2.0 * (comb_two_point(zp, 2.0, ctl.m_max, nullptr) + comb_two_point(zm, 2.0, ctl.m_max, nullptr));
  }
  s.value = 0.5 * pc.charge_squared() * sym.real();
  s.imag_residue = 0.5 * pc.charge_squared() * std::abs(sym.imag());
  switch (part) {
    case LargeSepPart::full: s.near_singular = in_band(nearest_distance(tau, 2, 1), reg); break;
    case LargeSepPart::l_comb: s.near_singular = in_band(nearest_distance(tau, 1, 0), reg); break;
    case LargeSepPart::two_l_comb: s.near_singular = in_band(nearest_distance(tau, 2, 0), reg); break;
  }
  return s;
}

CombResidual comb_resum_check(double test_width, const SeriesControl& ctl) {
  ctl.validate();
  if (!(test_width > 0.0)) throw InputError("test_width must be positive");
  const double w2 = test_width * test_width;
  const auto phi = [&](double k) { return std::exp(-k * k / (2.0 * w2)); };
  // Fourier transform int phi(k) e^{i m k} dk
  const auto phi_hat = [&](double m) { return test_width * std::sqrt(2.0 * kPi) * std::exp(-m * m * w2 / 2.0); };
  const long n_max = ctl.n_max > 0 ? ctl.n_max : 200;
  const long m_max = ctl.m_max;

  double even_lhs = 0.0, alt_lhs = 0.0, alt_scale = 0.0;
  for (long n = n_max; n >= 1; --n) {
    const double v = 2.0 * phi(kPi * static_cast<double>(n));  // n and -n
    if (n % 2 == 0) even_lhs += v;
    alt_lhs += (n % 2 == 0) ? v : -v;
    alt_scale += v;
  }
  even_lhs += phi(0.0);
  alt_lhs += phi(0.0);
  alt_scale += phi(0.0);

  double image_all = 0.0, image_even = 0.0;  // sum_m phi_hat(m), sum_m phi_hat(2m)
  for (long m = m_max; m >= 1; --m) {
    const double v = 2.0 * phi_hat(static_cast<double>(m));
    image_all += v;
    if (m % 2 == 0) image_even += v;
  }
  image_all += phi_hat(0.0);
  image_even += phi_hat(0.0);

  const double even_rhs = image_all / (2.0 * kPi);
  // 2 * (1/2pi) sum_m phi_hat(m) - (1/pi) sum_m phi_hat(2m)
  const double alt_rhs = image_all / kPi - image_even / kPi;

  CombResidual r;
  r.even = std::abs(even_lhs - even_rhs) / std::abs(even_lhs);
  r.alternating = std::abs(alt_lhs - alt_rhs) / alt_scale;
  return r;
}

}  // namespace casdec::field
