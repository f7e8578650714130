// Command-line front end. Exit codes: 0 success, 2 configuration or input
// error, 3 FloorUndecidable, 4 cap violation.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bracketlab::cli {

int run(int argc, char** argv);
/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bracketlab::cli
