#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flowgrowth::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitVerificationFailed = 3;
inline constexpr int kExitUsage = 64;

inline constexpr const char* kSchema = "flowgrowth/1";

/// Runs one command. `args` excludes the program name: args[0] is the
/// command, the rest are its flags. Artifacts go to --output (written
/// atomically) or to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string usage();

}  // namespace flowgrowth::cli
