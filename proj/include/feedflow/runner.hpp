#pragma once

#include <optional>
#include <string>

#include "feedflow/emit.hpp"
#include "feedflow/formulations.hpp"
#include "feedflow/metrics.hpp"
#include "feedflow/mintime.hpp"

namespace feedflow {

/// One fully resolved run request. Optional fields fall back to the
/// scenario's own defaults.
struct RunConfig {
    ControlMode control = ControlMode::Hpc;
    std::optional<MillingMode> milling;
    std::string pattern_text;              // empty = scenario default
    double delta_minutes = 0.0;            // 0 = scenario default
    double horizon_hours = 0.0;            // 0 = initial horizon (solve runs)
    ExpansionPolicy expansion = ExpansionPolicy::Optimized;
    bool bisect = false;
    std::optional<std::uint64_t> seed;     // overrides a random pattern's seed
    long iteration_limit = 0;              // 0 = env var / solver default
    int threads = 0;
};

struct RunResult {
    Trajectory trajectory;
    KpiReport kpis;
    bool is_min_time = false;
    double t_star_hours = 0.0;
    HorizonState horizon_state;   // min-time runs only
    FeedingPattern pattern;
    Scenario scenario;            // with overrides applied
};

/// Applies config overrides to a scenario copy (milling, period length,
/// pattern seed) and resolves the iteration limit, consulting
/// FEEDFLOW_SOLVER_ITER_LIMIT when the config leaves it at 0.
Scenario apply_overrides(const Scenario& scenario, const RunConfig& config);

RunResult run_solve(const Scenario& scenario, const RunConfig& config);
RunResult run_min_time(const Scenario& scenario, const RunConfig& config);

/// trajectory.csv, kpis.json and the three SVG charts (plus iterations.csv
/// for min-time runs) under `out_dir`, created if needed.
void write_run_artifacts(const RunResult& result, const std::string& out_dir);

/// Side-by-side KPI table, JSON deltas, paired trajectory charts.
ComparisonReport write_compare_artifacts(const RunResult& a, const RunResult& b,
                                         const std::string& out_dir);

/// Builds the configured model (HPC at k=0 / kmax per policy) and writes it
/// as MPS plus the name-table sidecar next to it.
void export_model_mps(const Scenario& scenario, const RunConfig& config,
                      const std::string& mps_path);

long resolve_iteration_limit(long configured);

}  // namespace feedflow
