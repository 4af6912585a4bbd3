#include "casdec/images.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "casdec/errors.hpp"
#include "casdec/specfun.hpp"

namespace casdec::images {
namespace {

void require_inside(double x) {
  if (!(std::abs(x) < 0.5)) {
    throw GeometryError("position x = " + std::to_string(x) + " is not strictly between the plates");
  }
}

void require_off_plate(double x) {
  require_inside(x);
  if (0.5 - std::abs(x) < kPlateGuard) {
    throw PoleError("image potential diverges at the plate, x = " + std::to_string(x),
                    x > 0 ? 0.5 : -0.5);
  }
}

// Summand of the image series as a function of u = 2n + 1 and b = 2x:
// 4x^2 / (u (u^2 - b^2)) = -1/u + (1/(u-b) + 1/(u+b)) / 2.
double summand(double u, double b) { return b * b / (u * (u * u - b * b)); }

double summand_du(double u, double b) {
  return 1.0 / (u * u) - 0.5 / ((u - b) * (u - b)) - 0.5 / ((u + b) * (u + b));
}

double summand_du3(double u, double b) {
  const auto p4 = [](double v) { return v * v * v * v; };
  return 6.0 / p4(u) - 3.0 / p4(u - b) - 3.0 / p4(u + b);
}

// Euler-Maclaurin estimate of sum_{n >= first} summand(2n+1, b).
double series_tail(long first, double b) {
  const double u = 2.0 * static_cast<double>(first) + 1.0;
  const double integral = -0.25 * std::log1p(-(b * b) / (u * u));
  const double f = summand(u, b);
  const double df = 2.0 * summand_du(u, b);    // d/dn
  const double d3f = 8.0 * summand_du3(u, b);  // d^3/dn^3
  return integral + 0.5 * f - df / 12.0 + d3f / 720.0;
}

}  // namespace

ImageSet image_positions(double x, int n_max) {
  require_inside(x);
  if (n_max < 1) throw InputError("n_max must be >= 1, got " + std::to_string(n_max));
  ImageSet set;
  set.n_max = n_max;
  set.source_x = x;
  set.positive_positions.reserve(2 * static_cast<std::size_t>(n_max));
  set.negative_positions.reserve(2 * static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    const double odd = 2.0 * n - 1.0;
    const double even = 2.0 * n;
    set.positive_positions.push_back(-odd - x);
    set.positive_positions.push_back(odd - x);
    set.negative_positions.push_back(-even + x);
    set.negative_positions.push_back(even + x);
  }
  return set;
}

double boundary_residual(double x, Plate plate, double y_offset, int n_max) {
  require_inside(x);
  if (n_max < 1) throw InputError("n_max must be >= 1, got " + std::to_string(n_max));
  const double xp = plate == Plate::right ? 0.5 : -0.5;
  const double y2 = y_offset * y_offset;
  const auto inv_dist = [&](double c) { return 1.0 / std::sqrt((xp - c) * (xp - c) + y2); };
  double sum = 0.0;
  // far images first
  for (int n = n_max; n >= 1; --n) {
    const double odd = 2.0 * n - 1.0;
    const double even = 2.0 * n;
    sum += inv_dist(-odd - x) + inv_dist(odd - x);
    sum -= inv_dist(-even + x) + inv_dist(even + x);
  }
  return sum - inv_dist(x);
}

double potential_series(double x, long n_max, bool tail_correction) {
  require_off_plate(x);
  if (n_max < 0) throw InputError("n_max must be >= 0");
  const double b = 2.0 * x;
  if (b == 0.0) return 0.0;
  double sum = tail_correction ? series_tail(n_max + 1, b) : 0.0;
  for (long n = n_max; n >= 0; --n) sum += summand(2.0 * static_cast<double>(n) + 1.0, b);
  return -2.0 * sum;
}

double potential_closed(double x) {
  require_off_plate(x);
  using specfun::harmonic_real;
  return 0.5 * (harmonic_real(-0.5 - x) + harmonic_real(-0.5 + x) + std::log(16.0));
}

double taylor_coefficient(int n) {
  if (n < 1 || 2 * n > specfun::kMaxPolygammaOrder) {
    throw ConfigError("Taylor coefficient index " + std::to_string(n) + " outside [1, " +
                      std::to_string(specfun::kMaxPolygammaOrder / 2) + "]");
  }
  double factorial = 1.0;
  for (int k = 2; k <= 2 * n; ++k) factorial *= k;
  return specfun::polygamma(2 * n, 0.5) / factorial;
}

double potential_taylor(double x, int n_terms) {
  require_off_plate(x);
  double sum = 0.0;
  for (int n = n_terms; n >= 1; --n) sum += taylor_coefficient(n) * std::pow(x, 2 * n);
  return sum;
}

void EffectivePotentialParams::validate() const {
  if (!(omega >= 0.0)) throw ConfigError("trap frequency must be >= 0");
  if (!(mass > 0.0)) throw ConfigError("mass must be positive");
  if (taylor_order < 2 || taylor_order % 2 != 0) {
    throw ConfigError("taylor_order must be even and >= 2, got " + std::to_string(taylor_order));
  }
  constants.validate();
}

double effective_frequency(const EffectivePotentialParams& params) {
  params.validate();
  const double radicand =
      params.omega * params.omega + params.constants.alpha * specfun::polygamma(2, 0.5) / params.mass;
  if (!(radicand > 0.0)) {
    throw InstabilityError("trap too weak: Omega^2 + alpha psi(2,1/2)/m = " + std::to_string(radicand) +
                           " <= 0, the electron runs to a plate");
  }
  return std::sqrt(radicand);
}

}  // namespace casdec::images
