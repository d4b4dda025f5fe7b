#pragma once

#include <ostream>

namespace dicke::cli {

inline constexpr const char* kArtifactVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kConfigError = 1, kNumericalFailure = 2, kValidationFailure = 3 };

// Entry point behind the `dicke` executable. Results go to `out` unless
// --out names a file; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dicke::cli
