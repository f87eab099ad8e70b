#pragma once

#include <stdexcept>
#include <string>

namespace hl {

/// Invalid or inconsistent user input (parameters, grids, protocols).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation that could not meet its stated tolerance or stability limit.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hl
