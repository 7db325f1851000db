#pragma once

#include <ostream>

namespace cone_lpv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitNonexistence = 10;
inline constexpr int kExitInconclusive = 20;

/// Entry point of the cone_lpv tool. Reports go to `out`, diagnostics and
/// usage errors to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cone_lpv::cli
