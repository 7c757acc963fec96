#pragma once

#include <stdexcept>

namespace ice {

// Invalid configuration or arguments; the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure (factorization, overflow); the CLI maps this to exit code 1.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ice
