#pragma once

// Reduced units: hbar = c = epsilon0 = 1 and the plate separation L = 1.
// Lengths are measured in L, times in L/c and energies in alpha*hbar*c/L.
// With these conventions e^2 = 4*pi*alpha.

#include <numbers>
#include <string_view>

namespace casdec {

inline constexpr double kCodataAlpha = 1.0 / 137.035999;

namespace si {
inline constexpr double c = 299792458.0;         // m/s
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double e = 1.602176634e-19;     // C
inline constexpr double epsilon0 = 8.8541878128e-12;  // F/m
}  // namespace si

struct PhysicalConstants {
  double alpha = kCodataAlpha;

  /// e^2 in reduced units.
  double charge_squared() const { return 4.0 * std::numbers::pi * alpha; }
  void validate() const;
};

/// Plate geometry. Internally L = 1 and the plates sit at x = -1/2 and x = 1/2;
/// `length_si` is only used when converting at the CLI boundary.
struct CavityConfig {
  double length_si = 1e-6;

  static constexpr double half_width() { return 0.5; }
  static bool contains(double x) { return x >= -0.5 && x <= 0.5; }
  void validate() const;
};

enum class QuantityKind { length, time, energy };

QuantityKind parse_quantity_kind(std::string_view name);
std::string_view to_string(QuantityKind kind);

class ReducedUnits {
 public:
  explicit ReducedUnits(const CavityConfig& cavity = {}, const PhysicalConstants& constants = {});

  double length_unit() const { return length_unit_; }
  double time_unit() const { return time_unit_; }
  double energy_unit() const { return energy_unit_; }
  double unit(QuantityKind kind) const;

  double to_reduced(double value_si, QuantityKind kind) const { return value_si / unit(kind); }
  double from_reduced(double value, QuantityKind kind) const { return value * unit(kind); }

 private:
  double length_unit_;
  double time_unit_;
  double energy_unit_;
};

}  // namespace casdec
