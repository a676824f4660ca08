// Subcommand dispatch for the command-line front end.
#pragma once

#include <iosfwd>
#include <string>

#include "ecodyn/config.hpp"

namespace ecodyn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// Subcommands: thresholds, equilibria, classify, simulate, bifurcate,
/// qssa-compare. Text reports and CSV go to `out` unless cfg.output names a
/// file; diagnostics go to `err`. Returns one of the kExit* codes.
int run(const std::string& subcommand, const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Random point of the invariant region for `p` (or of its reduced
/// counterpart), deterministic in `seed`.
Vec3 random_initial_state(const Params& p, Formulation f, std::uint64_t seed);

}  // namespace ecodyn
