#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pvass {

// Exit codes: 0 linear / success, 1 not-linear / invalid certificate,
// 2 unsupported structure, 3 input error.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace pvass
