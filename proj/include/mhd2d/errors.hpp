#pragma once

#include <stdexcept>
#include <string>

namespace mhd2d {

/// Thrown when a time integration step cannot continue (non-finite fields,
/// elliptic solve that fails to reach its residual target, ...).
class SolverError : public std::runtime_error {
  public:
    SolverError(const std::string& what, double residual = 0.0)
        : std::runtime_error(what), last_residual_(residual) {}

    double last_residual() const { return last_residual_; }

  private:
    double last_residual_;
};

/// Thrown on malformed run-configuration files or invalid CLI input.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mhd2d
