#pragma once

#include <string>
#include <vector>

namespace cone_embed::cli {

// Parses and executes one command line (program name excluded).  Returns the
// process exit code: 0 success, 1 usage error, 2 data error, 3 numerical
// failure.  `depth` guards manifest replay from recursing.
int run_cli(std::vector<std::string> args, int depth = 0);

}  // namespace cone_embed::cli
