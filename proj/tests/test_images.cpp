#include <doctest.h>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/polygamma.hpp>
#include <boost/math/special_functions/factorials.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "casdec/errors.hpp"
#include "casdec/images.hpp"

using namespace casdec;
using namespace casdec::images;

namespace {
// (1/2)[H(-1/2-x) + H(-1/2+x) + ln 16] built from an independent digamma.
double closed_oracle(double x) {
  const double g = 0.57721566490153286;
  const auto H = [g](double v) { return boost::math::digamma(v + 1.0) + g; };
  return 0.5 * (H(-0.5 - x) + H(-0.5 + x) + std::log(16.0));
}
}  // namespace

TEST_SUITE("images") {

TEST_CASE("image positions at the centre") {
  const auto set = image_positions(0.0, 1);
  REQUIRE(set.positive_positions.size() == 2);
  CHECK(set.positive_positions[0] == -1.0);
  CHECK(set.positive_positions[1] == 1.0);
  CHECK(set.negative_positions[0] == -2.0);
  CHECK(set.negative_positions[1] == 2.0);
}

TEST_CASE("image positions off centre") {
  const auto set = image_positions(0.2, 1);
  CHECK(set.positive_positions[0] == doctest::Approx(-1.2));
  CHECK(set.positive_positions[1] == doctest::Approx(0.8));
  CHECK(set.negative_positions[0] == doctest::Approx(-1.8));
  CHECK(set.negative_positions[1] == doctest::Approx(2.2));
}

TEST_CASE("negative images sit at 2nL from the electron") {
  for (double x : {-0.43, -0.1, 0.0, 0.27, 0.49}) {
    const auto set = image_positions(x, 25);
    for (int n = 1; n <= 25; ++n) {
      CHECK(std::abs(set.negative_positions[2 * (n - 1)] - x) == doctest::Approx(2.0 * n).epsilon(1e-14));
      CHECK(std::abs(set.negative_positions[2 * (n - 1) + 1] - x) == doctest::Approx(2.0 * n).epsilon(1e-14));
    }
    for (double p : set.positive_positions) CHECK(std::abs(p) <= 2.0 * 25 + std::abs(x));
    for (double p : set.negative_positions) CHECK(std::abs(p) <= 2.0 * 25 + std::abs(x));
  }
}

TEST_CASE("geometry errors") {
  CHECK_THROWS_AS(image_positions(0.5, 3), GeometryError);
  CHECK_THROWS_AS(image_positions(-0.7, 3), GeometryError);
  CHECK_THROWS_AS(image_positions(0.1, 0), InputError);
  CHECK_THROWS_AS(potential_closed(0.5), GeometryError);
  CHECK_THROWS_AS(potential_closed(0.5 - 1e-10), PoleError);
  CHECK_THROWS_AS(boundary_residual(0.6, Plate::left, 0.1, 10), GeometryError);
}

TEST_CASE("closed form against an independent digamma") {
  for (double x : {-0.45, -0.3, -0.05, 0.01, 0.2, 0.33, 0.4999}) {
    CHECK(potential_closed(x) == doctest::Approx(closed_oracle(x)).epsilon(1e-12));
  }
}

TEST_CASE("closed form vanishes at the centre") {
  CHECK(std::abs(potential_closed(0.0)) < 1e-10);
  CHECK(potential_series(0.0, 10) == 0.0);
  CHECK(potential_series(0.0, 1000000) == 0.0);
}

TEST_CASE("series and closed form agree") {
  for (double x : {0.05, 0.15, 0.25, 0.35, 0.45}) {
    for (double s : {1.0, -1.0}) {
      const double c = potential_closed(s * x);
      CHECK(std::abs(potential_series(s * x, 1000000) - c) / std::abs(c) < 1e-6);
    }
  }
}

TEST_CASE("tail estimate accelerates the raw series") {
  const double c = potential_closed(0.3);
  const double raw = std::abs(potential_series(0.3, 1000, false) - c);
  const double fixed = std::abs(potential_series(0.3, 1000, true) - c);
  CHECK(fixed < 1e-3 * raw);
  // raw partial sums approach the limit monotonically from above
  double prev = potential_series(0.3, 10, false);
  for (long n : {20L, 40L, 80L, 160L}) {
    const double v = potential_series(0.3, n, false);
    CHECK(v < prev);
    CHECK(v > c);
    prev = v;
  }
}

TEST_CASE("parity") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 0.499);
  for (int i = 0; i < 50; ++i) {
    const double x = u(rng);
    CHECK(std::abs(potential_closed(x) - potential_closed(-x)) <= 1e-12 * std::max(1.0, std::abs(potential_closed(x))));
  }
}

TEST_CASE("unstable equilibrium at the centre") {
  const double h = 1e-3;
  const double second = potential_closed(h) - 2.0 * potential_closed(0.0) + potential_closed(-h);
  CHECK(second < 0.0);
  CHECK(potential_closed(0.49) < potential_closed(0.45));
  CHECK(potential_closed(0.4999) < -3.0);
}

TEST_CASE("Taylor coefficients") {
  CHECK(std::abs(taylor_coefficient(1) + 8.4144) < 5e-4);
  for (int n = 1; n <= 6; ++n) {
    const double oracle = boost::math::polygamma(2 * n, 0.5) / boost::math::factorial<double>(2 * n);
    CHECK(taylor_coefficient(n) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(taylor_coefficient(n) < 0.0);
  }
  CHECK_THROWS_AS(taylor_coefficient(0), ConfigError);
  CHECK_THROWS_AS(taylor_coefficient(7), ConfigError);
}

TEST_CASE("Taylor sum near the centre") {
  const double c = potential_closed(0.1);
  CHECK(std::abs(potential_taylor(0.1, 3) - c) / std::abs(c) < 1e-4);
  CHECK(std::abs(potential_taylor(0.1, 6) - c) / std::abs(c) < 1e-8);
}

TEST_CASE("boundary residual decays under doubling") {
  double prev = std::abs(boundary_residual(0.0, Plate::right, 0.5, 100));
  for (int n = 200; n <= 12800; n *= 2) {
    const double r = std::abs(boundary_residual(0.0, Plate::right, 0.5, n));
    CHECK(r < prev);
    prev = r;
  }
  CHECK(std::abs(boundary_residual(0.0, Plate::right, 0.5, 10000)) < 1e-4);
  CHECK(std::abs(boundary_residual(0.3, Plate::left, 1.0, 10000)) < 1e-3);
}

TEST_CASE("boundary residual scales as 1/n_max") {
  const double r1 = boundary_residual(0.1, Plate::left, 0.4, 1000);
  const double r2 = boundary_residual(0.1, Plate::left, 0.4, 2000);
  CHECK(r1 / r2 == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("effective frequency") {
  EffectivePotentialParams p;
  p.omega = 2.0;
  p.mass = 10.0;
  const double w = effective_frequency(p);
  CHECK(w < p.omega);
  CHECK(w * w == doctest::Approx(4.0 + p.constants.alpha * boost::math::polygamma(2, 0.5) / 10.0).epsilon(1e-14));
  p.mass = 1e12;
  CHECK(effective_frequency(p) == doctest::Approx(2.0).epsilon(1e-12));
  p.mass = 10.0;
  p.constants.alpha = 1e-300;
  CHECK(effective_frequency(p) == doctest::Approx(2.0));
}

TEST_CASE("weak trap is unstable") {
  EffectivePotentialParams p;
  p.omega = 0.1;
  p.mass = 1.0;
  CHECK_THROWS_AS(effective_frequency(p), InstabilityError);
  p.taylor_order = 3;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

}
