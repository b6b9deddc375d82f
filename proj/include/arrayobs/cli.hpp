#pragma once

#include <string>
#include <vector>

namespace arrayobs {

/// Entry point for the command-line tool; `args` excludes the program name.
/// Exit codes: 0 success (verdicts are data, not errors), 2 validation or
/// usage error, 3 internal decision-path disagreement.
int cli_main(const std::vector<std::string>& args);

/// Exit code for the exception currently being handled.
int exit_code_for_current_exception();

}  // namespace arrayobs
