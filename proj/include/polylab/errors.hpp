// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace polylab {

// Bad model or call parameters. The cli maps this to exit code 2.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A numerical routine could not certify its answer. The cli maps this to exit code 3.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void check_alpha(double alpha) {
  if (alpha == 1.0) throw ParameterError("alpha=1 excluded");
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ParameterError("alpha must lie in (0,1) or (1,2]");
}

}  // namespace polylab
