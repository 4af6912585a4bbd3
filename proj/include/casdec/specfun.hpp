#pragma once

// Real-argument digamma / polygamma / harmonic-number / zeta functions.
//
// All of them shift the argument upward with the functional recurrence until it
// is large enough for the Stirling-type asymptotic series, so the accuracy is
// close to double precision across the supported domain. Poles throw
// casdec::PoleError instead of returning infinities.

namespace casdec::specfun {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr int kMaxPolygammaOrder = 12;

/// Derivative order of the digamma function, 0 <= n <= kMaxPolygammaOrder.
class PolygammaOrder {
 public:
  explicit PolygammaOrder(int n);
  int value() const { return n_; }

 private:
  int n_;
};

double digamma(double x);

/// n-th derivative of digamma, n >= 1, x > 0.
double polygamma(PolygammaOrder n, double x);
double polygamma(int n, double x);

/// H(x) = digamma(x + 1) + gamma; equals sum_{k=1}^{n} 1/k at positive integers.
double harmonic_real(double x);

/// Hurwitz zeta sum_{k>=0} (k + q)^{-s} for s > 1, q > 0.
double hurwitz_zeta(double s, double q);

/// Riemann zeta at integer s >= 2.
double zeta_int(int s);

/// sum_{m > m_last} m^{-s}, s > 1, m_last >= 0.
double zeta_tail(double s, long m_last);

}  // namespace casdec::specfun
