#pragma once

#include <ostream>

namespace ldp {

/// Exit codes: 0 ok, 2 usage, 3 unreadable or malformed input,
/// 4 numeric infeasibility. Data goes to `out`, messages to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace ldp
