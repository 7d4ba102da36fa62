#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hyerslab {

/// Entry point of the hyerslab command line: `run`, `bound-table` and
/// `split`. Returns the process exit status.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same as cli_main with argv[0] supplied; handy from tests.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hyerslab
