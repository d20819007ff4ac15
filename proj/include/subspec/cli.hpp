#pragma once

#include <iosfwd>

namespace subspec {

/// Exit codes: 0 success, 1 input error, 2 precondition violation, 3 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace subspec
