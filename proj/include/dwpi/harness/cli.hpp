#pragma once

#include <iosfwd>

namespace dwpi::harness {

/// Exit codes: 0 success, 1 runtime failure, 2 missing artifact, 3 invalid
/// configuration.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dwpi::harness
