#pragma once

#include <stdexcept>
#include <string>

namespace deconf {

// Invalid inputs, file contents, or configuration (CLI exit code 2).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Numeric failures at run time: rank deficiency, non-convergence, ... (exit 3).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace deconf
