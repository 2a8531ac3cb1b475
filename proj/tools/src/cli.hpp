#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bwlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitCompute = 3;

//! Runs the tool on `args` (without the program name). Reports go to `out`
//! unless --output is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace bwlab::cli
