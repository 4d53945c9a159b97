#pragma once

#include <ostream>

namespace dynid::cli {

/// Runs one command line. Returns the process exit code: 0 ok, 1 usage,
/// 2 schema, 3 numeric failure. Failures print one
/// `error=<code> msg=<text>` line to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dynid::cli
