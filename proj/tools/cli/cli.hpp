#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace parseid::cli {

// Runs the `parseid` command line. Returns the process exit code.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace parseid::cli
