#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hookstep {

/// The `hookstep` command line. Exit status: 0 success, 1 engine error or
/// failed check, 2 usage error.
int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace hookstep
