#pragma once

#include <string>
#include <vector>

namespace loewner_lab::cli {

// Parses argv, runs the selected subcommand and prints the run manifest to
// standard error. Returns 2 on usage errors, 1 on numeric failures.
int dispatch(const std::vector<std::string>& args);

}  // namespace loewner_lab::cli
