#pragma once

#include <stdexcept>
#include <string>

namespace memsvm {

/// Bad parameters, shape mismatches, out-of-range values, malformed config.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unreadable, malformed, or semantically broken input data.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The dual solver hit its pass limit before satisfying the KKT conditions.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Process exit codes used by the CLI; each exception class maps to one.
inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_config = 2;
inline constexpr int exit_data = 3;
inline constexpr int exit_convergence = 4;

}  // namespace memsvm
