#pragma once

#include <iosfwd>

namespace wpcsma {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitInfeasible = 2,
  kExitInvalidInput = 3,
  kExitTolerance = 4,
};

/// Entry point of the `wpcsma` command line tool. Subcommands:
///   analyze   --scenario F --point F [--out D]
///   optimize  --scenario F [--config F] --out D
///   simulate  --scenario F --point F --slots N --seed S --out D [--trace]
///   reproduce --exp {1|2} --out D
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wpcsma
