// SPDX-License-Identifier: Apache-2.0
//
// Batch front end. Exit codes: 0 success, 1 invalid input, 2 the model has
// no feasible answer for some requested point (output is still written).

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace urllc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitInfeasible = 2;

/// `args` excludes the program name. Results without --out go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace urllc::cli
