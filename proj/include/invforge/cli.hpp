#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace invforge::cli {

/// Exit codes of every command.
enum Exit : int { Pass = 0, Fail = 1, Usage = 2, Degenerate = 3 };

/// Runs the command line `args` (program name excluded).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Versioned JSON schema of a command's output, or empty if unknown.
std::string schema(const std::string& name);
std::vector<std::string> schema_names();

} // namespace invforge::cli
