#include "feedflow/mintime.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace feedflow {

double HorizonState::total_hours() const {
    return std::accumulate(budget_hours.begin(), budget_hours.end(), 0.0);
}

HorizonState initial_horizon(const Scenario& sc, const FeedingPattern& pattern) {
    (void)pattern;
    HorizonState state;
    state.budget_hours.resize(sc.levels.size(), 0.0);
    for (int s = 0; s < sc.levels.size(); ++s) {
        if (sc.bale.count[s] == 0) continue;
        double cap = system_capacity(sc.graph, s);
        state.budget_hours[s] = sc.total_bale_mass(s) / cap;
    }
    return state;
}

std::vector<double> max_processable(const Scenario& sc, const Schedule& schedule,
                                    ControlMode control, const MinTimeOptions& options) {
    BuildOptions build;
    build.relax_bale_constraint = true;

    Trajectory traj;
    if (control == ControlMode::Bffpc) {
        BffpcResult r = solve_bffpc(sc, schedule, schedule.periods(), options.solver, build);
        if (r.status == lp::SolveStatus::IterationLimit)
            throw SolverLimitError("max_processable: solver iteration limit reached");
        if (r.status != lp::SolveStatus::Optimal)
            throw InfeasibleError("max_processable: relaxed problem not optimal (" +
                                  std::string(lp::to_string(r.status)) + ")");
        traj = std::move(r.trajectory);
    } else {
        HpcResult r = solve_hpc(sc, schedule, schedule.periods(), options.solver,
                                options.expansion, build);
        if (r.status == lp::SolveStatus::IterationLimit)
            throw SolverLimitError("max_processable: solver iteration limit reached");
        if (r.status != lp::SolveStatus::Optimal)
            throw InfeasibleError("max_processable: relaxed problem not optimal (" +
                                  std::string(lp::to_string(r.status)) + ")");
        traj = std::move(r.trajectory);
    }

    std::vector<double> processed(sc.levels.size(), 0.0);
    for (int t = 0; t < traj.horizon; ++t)
        processed[traj.schedule.level_at(t)] += traj.in_feed[t];
    return processed;
}

HorizonState refine_horizon(const HorizonState& state, const Scenario& sc,
                            const std::vector<double>& max_processed) {
    if (max_processed.size() != state.budget_hours.size())
        throw InvariantError("refine_horizon: one processed mass per moisture level required");
    HorizonState out = state;
    for (int s = 0; s < static_cast<int>(state.budget_hours.size()); ++s) {
        if (sc.bale.count[s] == 0) continue;
        double required = sc.total_bale_mass(s);
        double excess = max_processed[s] - required;
        if (excess < -1e-9)
            throw InvariantError("refine_horizon: processed mass for level '" +
                                 sc.levels.label(s) + "' is below the required mass");
        double delta_h = excess / system_capacity(sc.graph, s);
        out.budget_hours[s] = std::max(0.0, state.budget_hours[s] - delta_h);
    }
    return out;
}

std::vector<int> split_periods(int total, const std::vector<double>& weights,
                               const std::vector<long>& bale_counts) {
    const int n = static_cast<int>(weights.size());
    std::vector<int> out(n, 0);
    double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (wsum <= 0.0 || total <= 0) return out;

    std::vector<double> raw(n, 0.0);
    int assigned = 0;
    for (int s = 0; s < n; ++s) {
        raw[s] = weights[s] / wsum * total;
        out[s] = static_cast<int>(std::floor(raw[s] + 1e-9));
        assigned += out[s];
    }
    // Largest remainder, ties to the lower index.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return raw[a] - std::floor(raw[a]) > raw[b] - std::floor(raw[b]);
    });
    for (int i = 0; assigned < total; ++i) {
        ++out[order[i % n]];
        ++assigned;
    }
    // Levels with bales need at least one period; take from the largest.
    for (int s = 0; s < n; ++s) {
        if (bale_counts[s] > 0 && out[s] == 0) {
            int donor = static_cast<int>(std::max_element(out.begin(), out.end()) - out.begin());
            if (out[donor] <= 1) return std::vector<int>(n, 0);  // cannot satisfy
            --out[donor];
            ++out[s];
            s = -1;  // re-check from the start
        }
    }
    return out;
}

namespace {

struct Prober {
    const Scenario& sc;
    const FeedingPattern& pattern;
    ControlMode control;
    const MinTimeOptions& options;
    std::vector<double> weights;
    HorizonState* state;
    // Feeding-time floor per level, whole periods: total mass over the
    // pre-buffer in-feed bound. No split below the floor can admit the mass,
    // so those probes are decided without a solve.
    std::vector<int> floor_periods;
    int iteration = 0;

    struct Outcome {
        bool feasible = false;
        double objective = 0.0;
    };

    void compute_floors() {
        floor_periods.assign(sc.levels.size(), 0);
        for (int s = 0; s < sc.levels.size(); ++s) {
            if (sc.bale.count[s] == 0) continue;
            ProcessGraph g = apply_milling_mode(sc.graph, sc.milling);
            double hours = sc.total_bale_mass(s) / max_infeed_rate(g, s);
            floor_periods[s] =
                std::max(1, static_cast<int>(std::ceil(hours * 60.0 / sc.period_minutes - 1e-9)));
        }
    }

    int floor_total() const {
        return std::accumulate(floor_periods.begin(), floor_periods.end(), 0);
    }

    std::vector<double> budgets_for(int total_periods) const {
        const int n = sc.levels.size();
        std::vector<double> budgets(n, 0.0);
        int slack = total_periods - floor_total();
        if (slack < 0) return budgets;  // below the floor: marker for infeasible
        std::vector<int> extra =
            slack > 0 ? split_periods(slack, weights, std::vector<long>(n, 0)) : std::vector<int>(n, 0);
        for (int s = 0; s < n; ++s)
            budgets[s] = (floor_periods[s] + extra[s]) * sc.period_minutes / 60.0;
        return budgets;
    }

    Outcome probe(int total_periods) {
        Outcome o;
        std::vector<double> budgets = budgets_for(total_periods);
        double btotal = std::accumulate(budgets.begin(), budgets.end(), 0.0);
        bool splittable = btotal > 0.0;
        for (size_t s = 0; s < budgets.size(); ++s)
            if (sc.bale.count[s] > 0 && budgets[s] <= 0.0) splittable = false;

        if (splittable) {
            Schedule sched = expand_pattern(sc, pattern, budgets);
            if (control == ControlMode::Bffpc) {
                BffpcResult r = solve_bffpc(sc, sched, sched.periods(), options.solver);
                if (r.status == lp::SolveStatus::IterationLimit)
                    throw SolverLimitError("min_time probe: solver iteration limit reached");
                o.feasible = r.status == lp::SolveStatus::Optimal;
                if (o.feasible) o.objective = r.trajectory.objective_full;
            } else {
                // Feasibility is monotone in the expansion option, so a probe
                // at the largest option decides it; the final solve still
                // enumerates the whole set.
                double k_probe = options.expansion == ExpansionPolicy::Optimized
                                     ? sc.econ.expansion_options.back()
                                     : 0.0;
                BuiltModel built = build_hpc(sc, sched, sched.periods(), k_probe);
                lp::Solution sol = lp::solve(built.model, options.solver.lp);
                if (sol.status == lp::SolveStatus::IterationLimit)
                    throw SolverLimitError("min_time probe: solver iteration limit reached");
                o.feasible = sol.optimal();
                if (o.feasible) o.objective = sol.objective - built.expansion_cost_constant;
            }
        }
        state->log.push_back({iteration++, budgets, o.feasible, o.objective});
        return o;
    }
};

}  // namespace

MinTimeResult min_time(const Scenario& scenario, const FeedingPattern& pattern,
                       ControlMode control, MillingMode milling, const MinTimeOptions& options) {
    Scenario sc = scenario;
    sc.milling = milling;

    HorizonState state = initial_horizon(sc, pattern);
    Schedule initial_schedule = expand_pattern(sc, pattern, state.budget_hours);
    const int initial_periods = initial_schedule.periods();

    std::vector<double> maxp = max_processable(sc, initial_schedule, control, options);
    HorizonState refined = refine_horizon(state, sc, maxp);
    state.budget_hours = refined.budget_hours;

    Prober prober{sc, pattern, control, options, refined.budget_hours, &state, {}};
    prober.compute_floors();

    int refined_periods = 0;
    for (size_t s = 0; s < refined.budget_hours.size(); ++s)
        refined_periods +=
            static_cast<int>(std::ceil(refined.budget_hours[s] * 60.0 / sc.period_minutes - 1e-9));
    refined_periods = std::min(refined_periods, initial_periods);
    refined_periods = std::max(refined_periods, prober.floor_total());
    refined_periods = std::max(refined_periods, 1);

    const int cap_periods = std::max(4 * initial_periods, initial_periods + 8);
    int best_feasible = -1;

    Prober::Outcome start = prober.probe(refined_periods);
    if (start.feasible) {
        best_feasible = refined_periods;
        if (options.bisect) {
            int lo = prober.floor_total() - 1;  // below the feeding-time floor
            int hi = refined_periods;
            while (hi - lo > 1) {
                int mid = lo + (hi - lo) / 2;
                if (prober.probe(mid).feasible) hi = mid;
                else lo = mid;
            }
            best_feasible = hi;
        } else {
            int p = refined_periods - 1;
            while (p >= 1) {
                if (options.recompute_each_iteration) {
                    std::vector<double> budgets = prober.budgets_for(best_feasible);
                    Schedule sched = expand_pattern(sc, pattern, budgets);
                    std::vector<double> mp = max_processable(sc, sched, control, options);
                    HorizonState h2{budgets, {}};
                    prober.weights = refine_horizon(h2, sc, mp).budget_hours;
                }
                if (!prober.probe(p).feasible) break;
                best_feasible = p;
                --p;
            }
        }
    } else {
        if (options.bisect) {
            int lo = refined_periods;
            int hi = -1;
            int candidate = std::max(initial_periods, refined_periods + 1);
            while (candidate <= cap_periods) {
                if (prober.probe(candidate).feasible) {
                    hi = candidate;
                    break;
                }
                lo = candidate;
                candidate *= 2;
            }
            if (hi < 0)
                throw InfeasibleError("min_time: no feasible horizon up to " +
                                      std::to_string(cap_periods) + " periods");
            while (hi - lo > 1) {
                int mid = lo + (hi - lo) / 2;
                if (prober.probe(mid).feasible) hi = mid;
                else lo = mid;
            }
            best_feasible = hi;
        } else {
            int p = refined_periods + 1;
            while (p <= cap_periods) {
                if (prober.probe(p).feasible) {
                    best_feasible = p;
                    break;
                }
                ++p;
            }
            if (best_feasible < 0)
                throw InfeasibleError("min_time: no feasible horizon up to " +
                                      std::to_string(cap_periods) + " periods");
        }
    }

    // Final full solve at the minimum horizon.
    std::vector<double> budgets = prober.budgets_for(best_feasible);
    Schedule sched = expand_pattern(sc, pattern, budgets);
    state.budget_hours = budgets;

    MinTimeResult result;
    result.control = control;
    result.total_periods = best_feasible;
    result.t_star_hours = best_feasible * sc.period_minutes / 60.0;
    if (control == ControlMode::Bffpc) {
        BffpcResult r = solve_bffpc(sc, sched, sched.periods(), options.solver);
        if (r.status != lp::SolveStatus::Optimal)
            throw InfeasibleError("min_time: final solve failed (" +
                                  std::string(lp::to_string(r.status)) + ")");
        result.trajectory = std::move(r.trajectory);
    } else {
        HpcResult r = solve_hpc(sc, sched, sched.periods(), options.solver, options.expansion);
        if (r.status != lp::SolveStatus::Optimal)
            throw InfeasibleError("min_time: final solve failed (" +
                                  std::string(lp::to_string(r.status)) + ")");
        result.trajectory = std::move(r.trajectory);
    }
    result.state = std::move(state);
    return result;
}

}  // namespace feedflow
