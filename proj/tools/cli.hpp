#pragma once

// Command-line front end. `run` takes the arguments after the program name.
// Nonzero status is 1 for domain errors and 2 for usage or I/O errors.

#include <iosfwd>
#include <string>
#include <vector>

namespace excised::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace excised::cli
