#pragma once

#include <string>

#include "pomsim/config.hpp"

namespace pomsim {

// Execute one fully-resolved run: dispatch on the command, write the output
// files atomically into config.out_dir, and print a one-screen summary to
// stdout. Returns the process exit status (0 on success). Numerical or I/O
// failures are reported as a JSON diagnostic on stderr with a nonzero
// status.
int run(const RunConfig& config);

}  // namespace pomsim
