#pragma once

#include <ostream>

namespace distsdp {

// Entry point of the command-line tool. Returns 0 on success, 1 on invalid
// input and 2 when a solver stopped at its iteration cap.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace distsdp
