#pragma once

#include <ostream>

namespace pm::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 2;
inline constexpr int kUndecided = 3;

/// Runs one pmtool invocation; JSON results go to out, diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pm::cli
