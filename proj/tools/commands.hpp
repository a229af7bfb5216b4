// SPDX-License-Identifier: Apache-2.0
//
// fameeq command line: ber-sweep, mse-check, oracle-gap, quantize-demo.
//
// Exit codes: 0 success, 1 runtime failure or failed check, 2 usage or
// configuration error.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fameeq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

inline constexpr const char* kOracleGapHeader =
    "instance,user,opt_objective,flmmse_objective,fbs_objective,flmmse_ratio,fbs_ratio";
inline constexpr const char* kMseCheckHeader = "instance,kind,bits,analytic_nu_sq,mc_mse,rel_dev";

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fameeq::cli
