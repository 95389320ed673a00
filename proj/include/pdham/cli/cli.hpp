#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pdham::cli {

/// Runs one command line (without the program name). Returns the exit code:
/// 0 verified, 1 falsified, 2 input error, 3 unsupported, 4 unknown.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pdham::cli
