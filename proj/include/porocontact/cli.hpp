#pragma once

#include <ostream>

namespace porocontact {

/// Entry point of the command-line driver. Subcommands: run, sweep,
/// validate, compare-oracle, print-bound. Returns the process exit status;
/// failures are reported on `err` as "error: <kind>: <message>".
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace porocontact
