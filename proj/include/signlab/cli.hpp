#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace signlab::cli {

/// Runs the signlab command line. args[0] is the program name.
/// Returns 0 on success, 1 when the library rejects the input (one line
/// starting with "error:" on err), 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace signlab::cli
