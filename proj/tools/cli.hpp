#pragma once

#include <iosfwd>

namespace numeracy::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `numeracy` tool. Returns 0 on success, 1 when an
/// experiment cell or check fails, 2 on usage or configuration errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace numeracy::cli
