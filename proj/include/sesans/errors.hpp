#pragma once

#include <stdexcept>
#include <string>

namespace sesans {

/// Machine-readable failure categories, mapped to CLI exit codes.
enum class ErrorCategory {
  config,       // unreadable or unparseable input
  validation,   // parsed but violates an invariant
  band,         // spin echo length outside the admissible TOF band
  grid,         // sample grid too coarse for the requested operation
  convergence,  // quadrature/grid refinement failed to converge
  io,           // filesystem failure
};

inline const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::validation: return "validation";
    case ErrorCategory::band: return "band";
    case ErrorCategory::grid: return "grid";
    case ErrorCategory::convergence: return "convergence";
    case ErrorCategory::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}
  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

}  // namespace sesans
