#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "opasym/io.hpp"

namespace opasym::cli {

// Exit codes. Every command prints one JSON object on stdout, including an
// {"error": ...} object on failure; diagnostics go to stderr.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolated = 1;   // bound violated or scenario mismatch
inline constexpr int kExitUsage = 2;      // bad flags, unreadable or malformed input
inline constexpr int kExitInvariant = 3;  // input rejected by a precondition or invariant
inline constexpr int kExitInternal = 4;

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "pauli:x|y|z|i" or a matrix file.
Observable parse_observable_arg(const std::string& spec);
/// "ket:0|1|+|-|+y|-y", "pauli:..." is rejected, otherwise a state file.
io::StateInput parse_state_arg(const std::string& spec);

}  // namespace opasym::cli
