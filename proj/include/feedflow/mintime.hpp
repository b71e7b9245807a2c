#pragma once

#include <functional>
#include <vector>

#include "feedflow/formulations.hpp"
#include "feedflow/scenario.hpp"

namespace feedflow {

struct HorizonProbe {
    int iteration = 0;
    std::vector<double> budget_hours;  // per moisture level
    bool feasible = false;
    double objective = 0.0;
};

/// Per-moisture time budgets plus the append-only probe log.
struct HorizonState {
    std::vector<double> budget_hours;
    std::vector<HorizonProbe> log;

    double total_hours() const;
};

struct MinTimeOptions {
    bool bisect = false;                 // binary search instead of linear decrement
    bool recompute_each_iteration = false;  // re-run max_processable every loop
    ExpansionPolicy expansion = ExpansionPolicy::Optimized;
    SolveSettings solver;
};

/// t0 per moisture: total bale mass divided by the system bottleneck rate.
HorizonState initial_horizon(const Scenario& scenario, const FeedingPattern& pattern);

/// Maximum mass processable per moisture within the schedule: solves the
/// formulation with the bale constraint relaxed to >= (always feasible).
std::vector<double> max_processable(const Scenario& scenario, const Schedule& schedule,
                                    ControlMode control,
                                    const MinTimeOptions& options = {});

/// Shrinks each budget by the excess-capacity time
/// (max_processed - required mass) / system capacity. Throws on negative
/// excess (max_processed below the required mass).
HorizonState refine_horizon(const HorizonState& state, const Scenario& scenario,
                            const std::vector<double>& max_processed);

struct MinTimeResult {
    double t_star_hours = 0.0;
    int total_periods = 0;
    Trajectory trajectory;
    HorizonState state;
    ControlMode control = ControlMode::Hpc;
};

/// Iterative minimum-horizon search: initialize from bottleneck rates,
/// refine with one relaxed solve, then shrink (linearly or by bisection,
/// exploiting feasibility monotonicity in the horizon) until the smallest
/// whole-period horizon at which the fixed-bale problem stays feasible.
/// Throws InfeasibleError if even the bracket-expansion cap is infeasible.
MinTimeResult min_time(const Scenario& scenario, const FeedingPattern& pattern,
                       ControlMode control, MillingMode milling,
                       const MinTimeOptions& options = {});

struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Splits a total period count across moisture levels proportionally to
/// weights, largest-remainder rounding, at least one period per level with
/// bales. Exposed for tests.
std::vector<int> split_periods(int total_periods, const std::vector<double>& weights,
                               const std::vector<long>& bale_counts);

}  // namespace feedflow
