#pragma once

#include <iosfwd>

#include "viaduct/error.hpp"

namespace viaduct::cli {

enum Exit : int {
  ok = 0,
  not_member = 1,
  usage = 2,
  validation = 3,
  budget = 4,
  hard_diff = 5,
  synthesis = 6,
  io = 7,
};

int exit_code(ErrorKind kind);

/// Runs one command line (argv[0] is the program name).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace viaduct::cli
