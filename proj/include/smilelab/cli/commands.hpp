#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace smilelab::cli {

std::string tool_version();

/// Runs the smile_lab command line. Results go to files under --out-dir and a
/// JSON listing of them to `out`; failures print {code, message, context} to `err`.
/// Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace smilelab::cli
