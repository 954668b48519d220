#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flp::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode { kOk = 0, kFailure = 1, kInconclusive = 2, kError = 3 };

/// Runs `flpcheck` with `args` (without the program name). Reports go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flp::cli
