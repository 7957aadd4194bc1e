#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace handoff {

/**
 * Command-line entry point; args follow argv convention (args[0] is the
 * program name). Returns the process exit code: 0 on success, 1 for
 * validation or solver failures on well-formed inputs, 2 for usage, I/O
 * and schema errors.
 */
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace handoff
