#pragma once

#include <string>

#include "distsdp/problem.hpp"

namespace distsdp {

// Parses the JSON problem format:
//   { "n": int, "edges": [[j, l, w, owner], ...], "agents": [[...], ...] }
// Indices and owners are 1-based. An edge given as [j, l, w] is assigned to
// the lowest-numbered agent holding both endpoints. Diagonal entries are
// dropped with a warning. Errors are InvalidProblem with the offending field
// named in the message.
Problem parse_problem(const std::string& text);
Problem load_problem(const std::string& path);

std::string dump_problem(const Problem& problem);

}  // namespace distsdp
