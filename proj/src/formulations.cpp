#include "feedflow/formulations.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace feedflow {

std::string_view to_string(ControlMode mode) {
    return mode == ControlMode::Bffpc ? "bffpc" : "hpc";
}

std::string_view to_string(MillingMode mode) {
    return mode == MillingMode::WithFractional ? "with_fractional" : "without_fractional";
}

namespace {

// Column layout per period: X, Y, Xo[e...], Xs[su, s...], Ms[su, s...],
// Bp, Bn. Keeping each period contiguous gives the basis its staircase shape.
int offset_x() { return 0; }
int offset_y() { return 1; }

}  // namespace

int VariableIndex::in_feed(int t) const { return t * cols_per_period + offset_x(); }
int VariableIndex::conveyor_speed(int t) const { return t * cols_per_period + offset_y(); }
int VariableIndex::outflow(int e, int t) const { return t * cols_per_period + 2 + e; }
int VariableIndex::storage_out(int su_pos, int s, int t) const {
    return t * cols_per_period + 2 + nequipment + su_pos * nlevels + s;
}
int VariableIndex::inventory(int su_pos, int s, int t) const {
    return t * cols_per_period + 2 + nequipment +
           static_cast<int>(storage_units.size()) * nlevels + su_pos * nlevels + s;
}
int VariableIndex::beta_plus(int t) const {
    if (!has_beta || t < 1) return -1;
    return t * cols_per_period + 2 + nequipment + 2 * static_cast<int>(storage_units.size()) * nlevels;
}
int VariableIndex::beta_minus(int t) const {
    int bp = beta_plus(t);
    return bp < 0 ? -1 : bp + 1;
}
int VariableIndex::storage_pos(int graph_index) const {
    for (size_t p = 0; p < storage_units.size(); ++p)
        if (storage_units[p] == graph_index) return static_cast<int>(p);
    return -1;
}

namespace {

std::string idx_name(const char* base, int t) {
    return std::string(base) + "[" + std::to_string(t + 1) + "]";
}
std::string idx_name(const char* base, const std::string& id, int t) {
    return std::string(base) + "[" + id + "," + std::to_string(t + 1) + "]";
}
std::string idx_name(const char* base, const std::string& id, const std::string& lvl, int t) {
    return std::string(base) + "[" + id + "," + lvl + "," + std::to_string(t + 1) + "]";
}

BuiltModel build_common(const Scenario& sc, const Schedule& schedule, int horizon,
                        ControlMode control, double expansion_k, const BuildOptions& options) {
    if (schedule.periods() != horizon)
        throw InvariantError("build: schedule horizon (" + std::to_string(schedule.periods()) +
                             ") does not match requested horizon (" + std::to_string(horizon) +
                             ")");

    BuiltModel built;
    built.control = control;
    built.expansion_k = expansion_k;
    built.graph = apply_milling_mode(sc.graph, sc.milling);
    built.milling = sc.milling;
    built.schedule = schedule;
    built.pellet_price = sc.econ.pellet_price;

    const ProcessGraph& g = built.graph;
    const int E = g.size();
    const int L = sc.levels.size();
    const int T = horizon;
    const double dt_h = sc.period_minutes / 60.0;  // hours per period
    const bool hpc = control == ControlMode::Hpc;

    lp::LpModel& m = built.model;
    m.name = hpc ? "HPC" : "BFFPC";
    m.objective_sense = lp::ObjSense::Maximize;

    VariableIndex& ix = built.index;
    ix.horizon = T;
    ix.nlevels = L;
    ix.nequipment = E;
    ix.storage_units = g.storage_units();
    ix.has_beta = hpc;
    const int SU = static_cast<int>(ix.storage_units.size());
    ix.cols_per_period = 2 + E + 2 * SU * L + (hpc ? 2 : 0);

    if (T == 0) return built;

    // Per-level derived data.
    std::vector<std::vector<double>> dbar(SU);  // average stored density
    for (int p = 0; p < SU; ++p) dbar[p] = metering_density(g, ix.storage_units[p]);

    const int terminal = g.terminal;
    const double eta = sc.econ.pellet_price;
    // alpha is $/ (dry Mg/minute); beta columns carry dry Mg/period.
    const double alpha = sc.econ.feed_adjust_penalty / sc.period_minutes;

    // ---- columns ----
    for (int t = 0; t < T; ++t) {
        const int s_t = schedule.level_at(t);
        m.add_column(idx_name("X", t), 0.0, lp::kInfinity, 0.0);
        m.add_column(idx_name("Y", t), 0.0, lp::kInfinity, 0.0);
        for (int e = 0; e < E; ++e) {
            // Capacity (Problem constraint on every outflow) carried as a
            // column upper bound: x-bar for the active moisture, per period.
            double cap = g.equipment[e].max_infeed[s_t] * dt_h;
            double obj = (e == terminal) ? eta : 0.0;
            m.add_column(idx_name("Xo", g.equipment[e].id, t), 0.0, cap, obj);
        }
        for (int p = 0; p < SU; ++p) {
            const std::string& id = g.equipment[ix.storage_units[p]].id;
            for (int s = 0; s < L; ++s)
                m.add_column(idx_name("Xs", id, sc.levels.label(s), t), 0.0, lp::kInfinity, 0.0);
        }
        for (int p = 0; p < SU; ++p) {
            const std::string& id = g.equipment[ix.storage_units[p]].id;
            for (int s = 0; s < L; ++s)
                m.add_column(idx_name("Ms", id, sc.levels.label(s), t), 0.0, lp::kInfinity, 0.0);
        }
        if (hpc) {
            // No linking row at t=0: the startup change is not penalized, so
            // the columns there are pinned to zero.
            double ub = (t == 0) ? 0.0 : lp::kInfinity;
            m.add_column(idx_name("Bp", t), 0.0, ub, -alpha);
            m.add_column(idx_name("Bn", t), 0.0, ub, -alpha);
        }
    }

    // ---- rows ----
    for (int t = 0; t < T; ++t) {
        const int s_t = schedule.level_at(t);
        const double gamma_t = gamma(sc, schedule, t);

        // In-feed from conveyor speed: X[t] - gamma_t * Y[t] = 0.
        m.add_row(idx_name("feed", t), lp::RowSense::Equal, 0.0,
                  {{ix.in_feed(t), 1.0}, {ix.conveyor_speed(t), -gamma_t}});

        // Flow balance per equipment.
        for (int e = 0; e < E; ++e) {
            const EquipmentSpec& spec = g.equipment[e];
            std::vector<std::pair<int, double>> coeffs;
            coeffs.emplace_back(ix.outflow(e, t), 1.0);

            if (spec.is_storage()) {
                // Outflow ties to the per-moisture discharge columns.
                for (int s = 0; s < L; ++s) coeffs.emplace_back(ix.storage_out(ix.storage_pos(e), s, t), -1.0);
                m.add_row(idx_name("out", spec.id, t), lp::RowSense::Equal, 0.0, std::move(coeffs));
                continue;
            }

            double factor = 1.0;
            if (spec.is_grinder()) factor = 1.0 - spec.dry_matter_loss;
            if (spec.bypass_leg) {
                // Bypass leg: theta share of the separator outflow.
                int sep = g.predecessors[e].at(0);
                factor = g.equipment[sep].bypass_ratio[s_t];
            } else {
                // The non-bypass child of a separator gets the complement.
                for (int p : g.predecessors[e]) {
                    if (g.equipment[p].is_separator()) {
                        bool sep_has_leg = false;
                        for (int sj : g.successors(p))
                            if (g.equipment[sj].bypass_leg) sep_has_leg = true;
                        if (sep_has_leg) factor *= 1.0 - g.equipment[p].bypass_ratio[s_t];
                    }
                }
            }

            if (g.predecessors[e].empty()) {
                // Source equipment is fed by the system in-feed.
                coeffs.emplace_back(ix.in_feed(t), -factor);
            } else {
                for (int p : g.predecessors[e]) coeffs.emplace_back(ix.outflow(p, t), -factor);
            }
            m.add_row(idx_name("flow", spec.id, t), lp::RowSense::Equal, 0.0, std::move(coeffs));
        }

        // Storage inventory balance and capacities.
        for (int p = 0; p < SU; ++p) {
            int e = ix.storage_units[p];
            const EquipmentSpec& spec = g.equipment[e];
            const std::string& id = spec.id;
            for (int s = 0; s < L; ++s) {
                std::vector<std::pair<int, double>> coeffs;
                coeffs.emplace_back(ix.inventory(p, s, t), 1.0);
                if (t > 0) coeffs.emplace_back(ix.inventory(p, s, t - 1), -1.0);
                if (s == s_t) {
                    for (int pr : g.predecessors[e]) coeffs.emplace_back(ix.outflow(pr, t), -1.0);
                }
                coeffs.emplace_back(ix.storage_out(p, s, t), 1.0);
                m.add_row(idx_name("inv", id, sc.levels.label(s), t), lp::RowSense::Equal, 0.0,
                          std::move(coeffs));
            }
            double mass_cap = spec.mass_capacity * (1.0 + expansion_k);
            double vol_cap = spec.volume_capacity * (1.0 + expansion_k);
            std::vector<std::pair<int, double>> mrow, vrow;
            for (int s = 0; s < L; ++s) {
                mrow.emplace_back(ix.inventory(p, s, t), 1.0);
                vrow.emplace_back(ix.inventory(p, s, t), 1.0 / dbar[p][s]);
            }
            m.add_row(idx_name("mcap", id, t), lp::RowSense::LessEqual, mass_cap, std::move(mrow));
            m.add_row(idx_name("vcap", id, t), lp::RowSense::LessEqual, vol_cap, std::move(vrow));
        }

        // Reactor feed change linking rows (HPC, t >= 1).
        if (hpc && t >= 1) {
            m.add_row(idx_name("beta", t), lp::RowSense::Equal, 0.0,
                      {{ix.beta_plus(t), 1.0},
                       {ix.beta_minus(t), -1.0},
                       {ix.outflow(terminal, t), -1.0},
                       {ix.outflow(terminal, t - 1), 1.0}});
        }
    }

    // Every bale is processed: sum of in-feed over a level's periods equals
    // that level's total bale mass.
    for (int s = 0; s < L; ++s) {
        std::vector<std::pair<int, double>> coeffs;
        for (int t = 0; t < T; ++t) {
            if (schedule.level_at(t) == s) coeffs.emplace_back(ix.in_feed(t), 1.0);
        }
        double required = sc.total_bale_mass(s);
        if (coeffs.empty()) {
            if (required > 0.0)
                throw InvariantError("build: level '" + sc.levels.label(s) +
                                     "' has bales but no scheduled periods");
            continue;
        }
        m.add_row("bale[" + sc.levels.label(s) + "]",
                  options.relax_bale_constraint ? lp::RowSense::GreaterEqual : lp::RowSense::Equal,
                  required, std::move(coeffs));
    }

    // Constant expansion operating cost for the chosen k (HPC reporting).
    if (hpc) {
        ExpansionCostTable table = derive_expansion_costs(sc);
        int kpos = -1;
        for (size_t i = 0; i < table.options.size(); ++i)
            if (table.options[i] == expansion_k) kpos = static_cast<int>(i);
        if (kpos < 0)
            throw InvariantError("build_hpc: expansion " + std::to_string(expansion_k) +
                                 " is not one of the scenario's options");
        double cost = 0.0;
        for (int t = 0; t < T; ++t) {
            int s_t = schedule.level_at(t);
            for (size_t row = 0; row < table.storage_index.size(); ++row) {
                // Skip storage units dropped by the milling mode.
                if (built.graph.find(sc.graph.equipment[table.storage_index[row]].id) < 0) continue;
                cost += table.at(static_cast<int>(row), s_t, kpos) * dt_h;
            }
        }
        built.expansion_cost_constant = cost;
    }
    return built;
}

}  // namespace

BuiltModel build_bffpc(const Scenario& sc, const Schedule& schedule, int horizon,
                       const BuildOptions& options) {
    return build_common(sc, schedule, horizon, ControlMode::Bffpc, 0.0, options);
}

BuiltModel build_hpc(const Scenario& sc, const Schedule& schedule, int horizon, double k,
                     const BuildOptions& options) {
    bool valid = std::any_of(sc.econ.expansion_options.begin(), sc.econ.expansion_options.end(),
                             [k](double o) { return o == k; });
    if (!valid)
        throw InvariantError("build_hpc: expansion option " + std::to_string(k) +
                             " not in the scenario's option set");
    return build_common(sc, schedule, horizon, ControlMode::Hpc, k, options);
}

double Trajectory::total_in_feed() const {
    double sum = 0.0;
    for (double v : in_feed) sum += v;
    return sum;
}

double Trajectory::total_reactor_output() const {
    double sum = 0.0;
    for (double v : reactor_feed()) sum += v;
    return sum;
}

Trajectory extract_trajectory(const lp::Solution& solution, const BuiltModel& built) {
    if (!solution.optimal())
        throw InvariantError("extract_trajectory: solution status is not optimal");

    const VariableIndex& ix = built.index;
    const int T = ix.horizon;
    const int E = ix.nequipment;
    const int L = ix.nlevels;
    const int SU = static_cast<int>(ix.storage_units.size());

    Trajectory traj;
    traj.horizon = T;
    traj.period_minutes = built.schedule.period_minutes;
    traj.k_star = built.expansion_k;
    traj.control = built.control;
    traj.milling = built.milling;
    traj.schedule = built.schedule;
    traj.graph = built.graph;
    traj.lp_objective = solution.objective;
    traj.iterations = solution.iterations;

    auto value = [&](int col) { return col >= 0 ? solution.values.at(col) : 0.0; };

    traj.in_feed.resize(T);
    traj.conveyor_speed.resize(T);
    traj.outflow.assign(E, std::vector<double>(T, 0.0));
    traj.storage_out.assign(SU, std::vector<std::vector<double>>(L, std::vector<double>(T, 0.0)));
    traj.inventory.assign(SU, std::vector<std::vector<double>>(L, std::vector<double>(T, 0.0)));
    traj.beta_plus.assign(T, 0.0);
    traj.beta_minus.assign(T, 0.0);

    for (int t = 0; t < T; ++t) {
        traj.in_feed[t] = value(ix.in_feed(t));
        traj.conveyor_speed[t] = value(ix.conveyor_speed(t));
        for (int e = 0; e < E; ++e) traj.outflow[e][t] = value(ix.outflow(e, t));
        for (int p = 0; p < SU; ++p) {
            for (int s = 0; s < L; ++s) {
                traj.storage_out[p][s][t] = value(ix.storage_out(p, s, t));
                traj.inventory[p][s][t] = value(ix.inventory(p, s, t));
            }
        }
        if (ix.has_beta && t >= 1) {
            traj.beta_plus[t] = value(ix.beta_plus(t));
            traj.beta_minus[t] = value(ix.beta_minus(t));
        }
    }

    double thr = 0.0;
    for (double v : traj.reactor_feed()) thr += v;
    traj.throughput_term = built.pellet_price * thr;
    traj.objective_full = solution.objective - built.expansion_cost_constant;
    return traj;
}

namespace {

int default_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

HpcResult solve_hpc(const Scenario& sc, const Schedule& schedule, int horizon,
                    const SolveSettings& settings, ExpansionPolicy policy,
                    const BuildOptions& build) {
    std::vector<double> options = sc.econ.expansion_options;
    if (policy == ExpansionPolicy::Fixed) options = {0.0};

    struct Attempt {
        double k;
        lp::Solution solution;
        BuiltModel built;
    };

    const int threads = std::min<int>(default_threads(settings.threads),
                                      static_cast<int>(options.size()));
    std::vector<Attempt> attempts(options.size());

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= options.size()) break;
            attempts[i].k = options[i];
            attempts[i].built = build_hpc(sc, schedule, horizon, options[i], build);
            attempts[i].solution = lp::solve(attempts[i].built.model, settings.lp);
        }
    };
    if (threads <= 1 || options.size() == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    HpcResult result;
    int best = -1;
    double best_obj = 0.0;
    bool any_limit = false;
    for (size_t i = 0; i < attempts.size(); ++i) {
        const auto& a = attempts[i];
        double full = a.solution.objective - a.built.expansion_cost_constant;
        result.attempts.push_back({a.k, a.solution.status, full});
        if (a.solution.status == lp::SolveStatus::IterationLimit) any_limit = true;
        if (a.solution.status != lp::SolveStatus::Optimal) continue;
        // Ties break toward the smaller expansion (scan order is ascending).
        if (best < 0 || full > best_obj + 1e-9 * std::max(1.0, std::fabs(best_obj))) {
            best = static_cast<int>(i);
            best_obj = full;
        }
    }
    if (best < 0) {
        result.status = any_limit ? lp::SolveStatus::IterationLimit : lp::SolveStatus::Infeasible;
        return result;
    }
    result.status = lp::SolveStatus::Optimal;
    result.k_star = attempts[best].k;
    result.trajectory = extract_trajectory(attempts[best].solution, attempts[best].built);
    result.trajectory.objective_full = best_obj;
    return result;
}

BffpcResult solve_bffpc(const Scenario& sc, const Schedule& schedule, int horizon,
                        const SolveSettings& settings, const BuildOptions& build) {
    BffpcResult result;
    BuiltModel built = build_bffpc(sc, schedule, horizon, build);
    lp::Solution solution = lp::solve(built.model, settings.lp);
    result.status = solution.status;
    if (solution.optimal()) result.trajectory = extract_trajectory(solution, built);
    return result;
}

}  // namespace feedflow
