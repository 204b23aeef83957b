#pragma once

#include <stdexcept>
#include <string>

namespace cmcausal {

// Malformed or degenerate data (bad rows, non-finite values, constant series).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Out-of-range parameters (orders, tolerances, plan fields).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace cmcausal
