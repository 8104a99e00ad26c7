#pragma once

// Command-line front end: sample, ktable, tune, density and validate.

#include <iosfwd>
#include <string>
#include <vector>

namespace tempest::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

inline constexpr int kSchemaVersion = 1;

/// Runs one invocation. `args` excludes the program name. Results go to
/// `out` (or the --out file); diagnostics are single lines on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tempest::cli
