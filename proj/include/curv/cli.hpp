#pragma once

#include <string>

namespace curv {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    int jobs = 1;
    bool emit_svg = false;
};

/// Batch commands behind the curvlab binary. Each returns the process exit
/// code: 0 success, 1 asserted-claim failure (verify), 2 solver NoConvergence
/// (solve) or StepFailure with partial output retained (sweep), 3 config
/// error with nothing written, 4 inconclusive verification.
int cmd_solve(const CliOptions& opt);
int cmd_verify(const CliOptions& opt);
int cmd_sweep(const CliOptions& opt);

} // namespace curv
