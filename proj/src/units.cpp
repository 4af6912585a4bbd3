#include "casdec/units.hpp"

#include <cmath>
#include <string>

#include "casdec/errors.hpp"

namespace casdec {

void PhysicalConstants::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("fine-structure constant must lie in (0, 1), got " + std::to_string(alpha));
  }
}

void CavityConfig::validate() const {
  if (!(length_si > 0.0) || !std::isfinite(length_si)) {
    throw ConfigError("plate separation must be positive, got " + std::to_string(length_si));
  }
}

QuantityKind parse_quantity_kind(std::string_view name) {
  if (name == "length") return QuantityKind::length;
  if (name == "time") return QuantityKind::time;
  if (name == "energy") return QuantityKind::energy;
  throw ConfigError("unknown quantity kind '" + std::string(name) + "'");
}

std::string_view to_string(QuantityKind kind) {
  switch (kind) {
    case QuantityKind::length: return "length";
    case QuantityKind::time: return "time";
    case QuantityKind::energy: return "energy";
  }
  return "unknown";
}

ReducedUnits::ReducedUnits(const CavityConfig& cavity, const PhysicalConstants& constants) {
  cavity.validate();
  constants.validate();
  length_unit_ = cavity.length_si;
  time_unit_ = cavity.length_si / si::c;
  energy_unit_ = constants.alpha * si::hbar * si::c / cavity.length_si;
}

double ReducedUnits::unit(QuantityKind kind) const {
  switch (kind) {
    case QuantityKind::length: return length_unit_;
    case QuantityKind::time: return time_unit_;
    case QuantityKind::energy: return energy_unit_;
  }
  throw ConfigError("unknown quantity kind");
}

}  // namespace casdec
