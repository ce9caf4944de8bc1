#pragma once

#include <stdexcept>
#include <string>

namespace polarsturm {

// Bad problem data: wrong shapes, broken symmetry in inputs, malformed
// config files, inconsistent parameters.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Computation failed: conditioning guard tripped, structure residual blew
// past tolerance, refinement or bracketing exhausted.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace polarsturm
