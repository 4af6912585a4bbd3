#include "casdec/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "casdec/errors.hpp"

namespace casdec::specfun {
namespace {

// B_2, B_4, ..., B_20
constexpr std::array<double, 10> kBernoulli2k = {
    1.0 / 6.0,        -1.0 / 30.0,    1.0 / 42.0,       -1.0 / 30.0,     5.0 / 66.0,
    -691.0 / 2730.0,  7.0 / 6.0,      -3617.0 / 510.0,  43867.0 / 798.0, -174611.0 / 330.0,
};

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// Asymptotic expansion of digamma, valid for y >= 10.
double digamma_asymptotic(double y) {
  const double inv2 = 1.0 / (y * y);
  double pow = inv2;
  double series = 0.0;
  for (std::size_t k = 0; k < kBernoulli2k.size(); ++k) {
    const double two_k = 2.0 * static_cast<double>(k + 1);
    series += kBernoulli2k[k] / (two_k)*pow;
    pow *= inv2;
  }
  return std::log(y) - 0.5 / y - series;
}

// Euler-Maclaurin asymptotic form of sum_{k>=0} (y+k)^{-s}, valid once y is
// large compared with s.
double hurwitz_asymptotic(double s, double y) {
  double result = std::pow(y, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(y, -s);
  // rising factorial s (s+1) ... (s+2k-2) / (2k)!
  double coeff = s;                     // k = 1: s / 2!
  double pow = std::pow(y, -s - 1.0);   // y^{-s-2k+1} at k = 1
  const double inv2 = 1.0 / (y * y);
  double fact = 2.0;
  for (std::size_t k = 0; k < kBernoulli2k.size(); ++k) {
    const double term = kBernoulli2k[k] * coeff / fact * pow;
    result += term;
    if (std::abs(term) < 1e-18 * std::abs(result)) break;
    const double n = 2.0 * static_cast<double>(k + 1);  // current 2k
    coeff *= (s + n - 1.0) * (s + n);
    fact *= (n + 1.0) * (n + 2.0);
    pow *= inv2;
  }
  return result;
}

}  // namespace

PolygammaOrder::PolygammaOrder(int n) : n_(n) {
  if (n < 0 || n > kMaxPolygammaOrder) {
    throw ConfigError("polygamma order " + std::to_string(n) + " outside supported range [0, " +
                      std::to_string(kMaxPolygammaOrder) + "]");
  }
}

double digamma(double x) {
  if (!std::isfinite(x)) throw DomainError("digamma argument is not finite");
  if (is_nonpositive_integer(x)) {
    throw PoleError("digamma pole at x = " + std::to_string(x), x);
  }
  if (x < 0.0) {
    // reflection: psi(x) = psi(1 - x) - pi cot(pi x)
    const double pi = std::numbers::pi;
    return digamma(1.0 - x) - pi / std::tan(pi * x);
  }
  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  return shift + digamma_asymptotic(x);
}

double polygamma(PolygammaOrder order, double x) {
  const int n = order.value();
  if (n == 0) return digamma(x);
  if (!(x > 0.0)) {
    if (is_nonpositive_integer(x)) throw PoleError("polygamma pole at x = " + std::to_string(x), x);
    throw DomainError("polygamma requires x > 0, got " + std::to_string(x));
  }
  // psi^(n)(x) = (-1)^(n+1) n! zeta(n+1, x)
  const double sign = (n % 2 == 1) ? 1.0 : -1.0;
  return sign * factorial(n) * hurwitz_zeta(n + 1.0, x);
}

double polygamma(int n, double x) {
  if (n < 1) throw ConfigError("polygamma(n, x) requires n >= 1; use digamma for n = 0");
  return polygamma(PolygammaOrder(n), x);
}

double harmonic_real(double x) {
  if (is_nonpositive_integer(x + 1.0)) {
    throw PoleError("harmonic number pole at x = " + std::to_string(x), x);
  }
  return digamma(x + 1.0) + kEulerGamma;
}

double hurwitz_zeta(double s, double q) {
  if (!(s > 1.0)) throw DomainError("Hurwitz zeta requires s > 1, got " + std::to_string(s));
  if (!(q > 0.0)) throw DomainError("Hurwitz zeta requires q > 0, got " + std::to_string(q));
  const double y_min = 20.0 + s;
  double direct = 0.0;
  // well-conditioned: accumulate the largest terms last
  int shifts = 0;
  if (q < y_min) shifts = static_cast<int>(std::ceil(y_min - q));
  for (int k = shifts - 1; k >= 0; --k) direct += std::pow(q + k, -s);
  return hurwitz_asymptotic(s, q + shifts) + direct;
}

double zeta_int(int s) {
  if (s < 2) throw DomainError("zeta_int requires integer s >= 2, got " + std::to_string(s));
  return hurwitz_zeta(static_cast<double>(s), 1.0);
}

double zeta_tail(double s, long m_last) {
  if (m_last < 0) throw DomainError("zeta_tail requires m_last >= 0");
  return hurwitz_zeta(s, static_cast<double>(m_last) + 1.0);
}

}  // namespace casdec::specfun
