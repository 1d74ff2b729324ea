#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace infotriage {

// Exit codes: 0 success, 1 user error (bad arguments or inputs), 2 internal error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace infotriage
