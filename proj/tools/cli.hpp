#pragma once

#include <iosfwd>

namespace sheafss::cli {

/// Runs the command line; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sheafss::cli
