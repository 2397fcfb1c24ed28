#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pathsum {

// Full command-line front end, callable in-process. `args` excludes the
// program name. Returns the process exit code: 0 success, 1 verification
// failure, 2 input error, 3 numeric error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

} // namespace pathsum
