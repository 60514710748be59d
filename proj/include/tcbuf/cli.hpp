#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tcbuf {

/// Entry point behind the `tcbuf` executable. `args` excludes the program name.
/// Returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tcbuf
