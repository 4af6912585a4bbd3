#pragma once

#include <stdexcept>
#include <string>

namespace casdec {

/// Base class for every error raised by the library. `kind()` is a short
/// machine-readable tag used by the CLI when it reports failures.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error("input", what) {}
};

class GeometryError : public Error {
 public:
  explicit GeometryError(const std::string& what) : Error("geometry", what) {}
};

/// Argument outside the domain of a special function or series.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain", what) {}
  DomainError(std::string kind, const std::string& what)
      : Error(std::move(kind), what) {}
};

/// Raised at (or numerically indistinguishable from) a pole. `location()` is
/// the pole position in the argument of the function that raised it.
class PoleError : public DomainError {
 public:
  PoleError(const std::string& what, double location)
      : DomainError("pole", what), location_(location) {}
  double location() const noexcept { return location_; }

 private:
  double location_;
};

/// Trap too weak to hold the electron against the image attraction.
class InstabilityError : public Error {
 public:
  explicit InstabilityError(const std::string& what) : Error("instability", what) {}
};

/// Quadrature or series failed to reach the requested tolerance.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error("numerical", what) {}
};

class StepSizeError : public Error {
 public:
  explicit StepSizeError(const std::string& what) : Error("step_size", what) {}
};

/// Density-matrix invariant violated during integration.
class IntegrationAbort : public Error {
 public:
  explicit IntegrationAbort(const std::string& what) : Error("integration_abort", what) {}
};

}  // namespace casdec
