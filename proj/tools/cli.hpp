#pragma once

#include <iosfwd>

namespace structrec {

// Exit codes shared by all subcommands.
enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 1,          // malformed input, missing file, schema violation
  kExitMaxIter = 2,        // recover: iteration cap reached
  kExitInfeasible = 3,     // recover: constraint set empty
  kExitNotCertified = 4,   // certify/nullspace/bound: nothing certified
  kExitUnsupported = 5,    // certify: method/structure/phi combination unsupported
  kExitAssertion = 6,      // experiment/axioms: a checked inequality failed
};

/// Entry point of the command-line tool; output goes to the given streams.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace structrec
