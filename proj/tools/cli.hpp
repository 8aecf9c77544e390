#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nids {

// Runs the command line. `args` excludes the program name. Returns the
// process exit status: 0 success, 1 usage or configuration error, 2 data or
// stage failure.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nids
