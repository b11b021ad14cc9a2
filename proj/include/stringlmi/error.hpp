#pragma once

#include <stdexcept>
#include <string>

namespace stringlmi {

/// Base class for every error raised by the library. Each error carries the
/// name of the module that raised it so the command-line front end can report
/// module-qualified codes such as "wave_sim.compatibility".
class Error : public std::runtime_error {
 public:
  Error(std::string module, std::string kind, const std::string& message)
      : std::runtime_error(module + ": " + message),
        module_(std::move(module)),
        kind_(std::move(kind)) {}

  const std::string& module() const noexcept { return module_; }
  const std::string& kind() const noexcept { return kind_; }
  std::string code() const { return module_ + "." + kind_; }

 private:
  std::string module_;
  std::string kind_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  DomainError(std::string module, const std::string& message)
      : Error(std::move(module), "domain", message) {}
};

/// Invalid configuration: sizes, orders, grids, tolerances.
class ConfigError : public Error {
 public:
  ConfigError(std::string module, const std::string& message)
      : Error(std::move(module), "config", message) {}
};

/// Operation called without its documented precondition holding.
class PreconditionError : public Error {
 public:
  PreconditionError(std::string module, const std::string& message)
      : Error(std::move(module), "precondition", message) {}
};

/// Initial data violating the boundary conditions.
class CompatibilityError : public Error {
 public:
  CompatibilityError(std::string module, const std::string& message)
      : Error(std::move(module), "compatibility", message) {}
};

/// Non-finite values produced while time stepping.
class DivergenceError : public Error {
 public:
  DivergenceError(std::string module, const std::string& message, double time)
      : Error(std::move(module), "divergence", message), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace stringlmi
