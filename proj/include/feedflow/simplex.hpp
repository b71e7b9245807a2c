#pragma once

#include "feedflow/lp_model.hpp"

namespace feedflow::lp {

/// Options for the bundled solver. An iteration limit of 0 means the default
/// 200 * (rows + cols).
struct SolveOptions {
    double feasibility_tol = 1e-7;
    double optimality_tol = 1e-7;
    long iteration_limit = 0;
    int bland_threshold = 50;   // degenerate pivots in a row before Bland's rule
    int refactor_interval = 100;
};

/// Two-phase primal revised simplex on sparse columns with variable bounds.
/// Reentrant; independent models may be solved concurrently.
Solution solve(const LpModel& model, const SolveOptions& options = {});

}  // namespace feedflow::lp
