#pragma once

#include <iosfwd>

namespace wardwatt::cli {

// Entry point of the `wardwatt` tool. Returns 0 on success, 1 for config or
// stage failures and 2 for usage errors. Every failure writes one line to
// `err` starting with "wardwatt: error[<kind>]: ".
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wardwatt::cli
