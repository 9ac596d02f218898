#pragma once

#include <string>

#include "qram/program.hpp"

namespace qram {

// Protocol names used by the CLI and the program JSON:
//   "nonparallel", "parallel", "hb-parallel", "hybrid-parallel"

Program compile_nonparallel(const TreeSpec& spec);
Program compile_parallel(const TreeSpec& spec);
// Uses spec.bandwidth as c; requires c | k.
Program compile_high_bandwidth(const TreeSpec& spec);
Program compile_hybrid_parallel(const TreeSpec& spec, int m);

// Dispatch on a protocol name. `m` is only used by hybrid-parallel.
Program compile(const std::string& protocol, const TreeSpec& spec, int m = 0);

}  // namespace qram
