#pragma once

#include <iosfwd>
#include <string>
#include <utility>

namespace sigmak {

/// "5" or "5..7", inclusive. Throws invalid_input otherwise.
std::pair<int, int> parse_n_range(const std::string& s);

/// Entry point of the sigmak tool. Returns the process exit code:
/// 0 success, 1 a gated check failed (verify) or a replay mismatched,
/// 2 bad usage, unknown id or an infeasible configuration.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sigmak
