#pragma once

#include <string>
#include <vector>

#include "feedflow/lp_model.hpp"
#include "feedflow/scenario.hpp"
#include "feedflow/simplex.hpp"

namespace feedflow {

enum class ControlMode { Bffpc, Hpc };
enum class ExpansionPolicy { Fixed, Optimized };

std::string_view to_string(ControlMode mode);
std::string_view to_string(MillingMode mode);

/// Column layout of a built model. Period indices are 0-based; beta columns
/// exist for t >= 1 only (the startup change is not penalized).
struct VariableIndex {
    int horizon = 0;
    int nlevels = 0;
    int nequipment = 0;
    std::vector<int> storage_units;  // graph indices of the storage set
    int cols_per_period = 0;
    bool has_beta = false;

    int in_feed(int t) const;                       // X[t]
    int conveyor_speed(int t) const;                // Y[t]
    int outflow(int e, int t) const;                // Xo[i,t]
    int storage_out(int su_pos, int s, int t) const;   // Xs[i,s,t]
    int inventory(int su_pos, int s, int t) const;     // Ms[i,s,t]
    int beta_plus(int t) const;                     // Bp[t], -1 when absent
    int beta_minus(int t) const;                    // Bn[t], -1 when absent
    int storage_pos(int graph_index) const;         // position in storage_units, -1 if not storage
};

/// A formulation instance: the LP, its column layout, the milling-adjusted
/// graph it was built on, and the constant part of the objective (storage
/// expansion operating cost, which does not depend on any column).
struct BuiltModel {
    lp::LpModel model;
    VariableIndex index;
    ProcessGraph graph;          // after apply_milling_mode
    ControlMode control = ControlMode::Bffpc;
    MillingMode milling = MillingMode::WithFractional;
    double expansion_k = 0.0;
    double expansion_cost_constant = 0.0;  // $ over the horizon, 0 for BFFPC
    double pellet_price = 0.0;
    Schedule schedule;
};

struct BuildOptions {
    /// Relax the every-bale-processed equality to >= (infinite supply).
    bool relax_bale_constraint = false;
};

/// Problem B: throughput-maximizing LP, fixed storage capacities, no feed
/// smoothing and no expansion columns.
BuiltModel build_bffpc(const Scenario& scenario, const Schedule& schedule, int horizon,
                       const BuildOptions& options = {});

/// Problem H with the expansion option fixed to k (k must be one of the
/// scenario's expansion options): expanded storage capacities, beta linking
/// rows, and the expansion operating cost carried as a reported constant.
BuiltModel build_hpc(const Scenario& scenario, const Schedule& schedule, int horizon, double k,
                     const BuildOptions& options = {});

/// Optimal per-period series of every model symbol, in model units
/// (dry Mg per period; conveyor speed in m per period).
struct Trajectory {
    int horizon = 0;
    double period_minutes = 1.0;
    double k_star = 0.0;
    ControlMode control = ControlMode::Bffpc;
    MillingMode milling = MillingMode::WithFractional;
    Schedule schedule;
    ProcessGraph graph;

    std::vector<double> in_feed;                       // X[t]
    std::vector<double> conveyor_speed;                // Y[t]
    std::vector<std::vector<double>> outflow;          // [equipment][t]
    std::vector<std::vector<std::vector<double>>> storage_out;  // [su][level][t]
    std::vector<std::vector<std::vector<double>>> inventory;    // [su][level][t]
    std::vector<double> beta_plus;                     // zero at t=0
    std::vector<double> beta_minus;

    double lp_objective = 0.0;           // as returned by the solver
    double objective_full = 0.0;         // Eq-style objective incl. expansion constant
    double throughput_term = 0.0;        // price-weighted reactor output alone
    long iterations = 0;

    const std::vector<double>& reactor_feed() const { return outflow.at(graph.terminal); }
    double total_in_feed() const;
    double total_reactor_output() const;
    double rate_to_per_hour() const { return 60.0 / period_minutes; }
};

/// Requires an optimal solution; converts nothing (values stay per-period).
Trajectory extract_trajectory(const lp::Solution& solution, const BuiltModel& built);

struct SolveSettings {
    lp::SolveOptions lp;
    int threads = 0;  // 0 = hardware concurrency
};

struct HpcAttempt {
    double k = 0.0;
    lp::SolveStatus status = lp::SolveStatus::Infeasible;
    double objective_full = 0.0;
};

struct HpcResult {
    lp::SolveStatus status = lp::SolveStatus::Infeasible;
    double k_star = 0.0;
    Trajectory trajectory;  // valid when status == Optimal
    std::vector<HpcAttempt> attempts;
};

/// Solves one LP per expansion option (in parallel) and keeps the best full
/// objective; ties go to the smaller expansion. A Fixed policy pins k = 0.
HpcResult solve_hpc(const Scenario& scenario, const Schedule& schedule, int horizon,
                    const SolveSettings& settings = {},
                    ExpansionPolicy policy = ExpansionPolicy::Optimized,
                    const BuildOptions& build = {});

struct BffpcResult {
    lp::SolveStatus status = lp::SolveStatus::Infeasible;
    Trajectory trajectory;
};

BffpcResult solve_bffpc(const Scenario& scenario, const Schedule& schedule, int horizon,
                        const SolveSettings& settings = {}, const BuildOptions& build = {});

}  // namespace feedflow
