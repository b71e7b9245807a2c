#include "feedflow/runner.hpp"

#include "feedflow/mps.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>

namespace feedflow {

namespace fs = std::filesystem;

long resolve_iteration_limit(long configured) {
    if (configured > 0) return configured;
    const char* env = std::getenv("FEEDFLOW_SOLVER_ITER_LIMIT");
    if (env && *env) {
        long v = 0;
        auto [ptr, ec] = std::from_chars(env, env + std::string_view(env).size(), v);
        if (ec == std::errc() && v > 0) return v;
    }
    return 0;  // solver default
}

Scenario apply_overrides(const Scenario& scenario, const RunConfig& config) {
    Scenario sc = scenario;
    if (config.milling) sc.milling = *config.milling;
    if (config.delta_minutes > 0.0) sc.period_minutes = config.delta_minutes;
    if (!config.pattern_text.empty())
        sc.default_pattern = parse_pattern(config.pattern_text, sc.levels);
    if (config.seed && sc.default_pattern.kind == FeedingPattern::Kind::Random) {
        sc.default_pattern.seed = *config.seed;
        sc.default_pattern.text = "random:seed=" + std::to_string(*config.seed);
    }
    return sc;
}

namespace {

SolveSettings settings_from(const RunConfig& config) {
    SolveSettings s;
    s.lp.iteration_limit = resolve_iteration_limit(config.iteration_limit);
    s.threads = config.threads;
    return s;
}

void fill_context(RunResult& result) {
    result.kpis.pattern = result.pattern.text;
    if (result.pattern.kind == FeedingPattern::Kind::Random)
        result.kpis.seed = result.pattern.seed;
}

}  // namespace

RunResult run_solve(const Scenario& scenario, const RunConfig& config) {
    Scenario sc = apply_overrides(scenario, config);
    const FeedingPattern& pattern = sc.default_pattern;
    SolveSettings settings = settings_from(config);

    HorizonState h = initial_horizon(sc, pattern);
    if (config.horizon_hours > 0.0) {
        double total = h.total_hours();
        if (total <= 0.0) throw InvariantError("run: scenario has no bales to process");
        for (double& b : h.budget_hours) b *= config.horizon_hours / total;
    }
    Schedule schedule = expand_pattern(sc, pattern, h.budget_hours);

    RunResult result;
    result.scenario = sc;
    result.pattern = pattern;
    if (config.control == ControlMode::Bffpc) {
        BffpcResult r = solve_bffpc(sc, schedule, schedule.periods(), settings);
        if (r.status == lp::SolveStatus::IterationLimit)
            throw SolverLimitError("solve: iteration limit reached");
        if (r.status != lp::SolveStatus::Optimal)
            throw InfeasibleError("solve: problem is " + std::string(lp::to_string(r.status)) +
                                  " at horizon " + std::to_string(schedule.horizon_hours()) + " h");
        result.trajectory = std::move(r.trajectory);
    } else {
        HpcResult r = solve_hpc(sc, schedule, schedule.periods(), settings, config.expansion);
        if (r.status == lp::SolveStatus::IterationLimit)
            throw SolverLimitError("solve: iteration limit reached");
        if (r.status != lp::SolveStatus::Optimal)
            throw InfeasibleError("solve: problem is " + std::string(lp::to_string(r.status)) +
                                  " at horizon " + std::to_string(schedule.horizon_hours()) + " h");
        result.trajectory = std::move(r.trajectory);
    }
    result.kpis = kpis(result.trajectory, sc);
    fill_context(result);
    return result;
}

RunResult run_min_time(const Scenario& scenario, const RunConfig& config) {
    Scenario sc = apply_overrides(scenario, config);
    const FeedingPattern& pattern = sc.default_pattern;

    MinTimeOptions options;
    options.bisect = config.bisect;
    options.expansion = config.expansion;
    options.solver = settings_from(config);

    MinTimeResult mt = min_time(sc, pattern, config.control,
                                config.milling.value_or(sc.milling), options);

    RunResult result;
    result.scenario = sc;
    result.scenario.milling = config.milling.value_or(sc.milling);
    result.pattern = pattern;
    result.trajectory = std::move(mt.trajectory);
    result.is_min_time = true;
    result.t_star_hours = mt.t_star_hours;
    result.horizon_state = std::move(mt.state);
    result.kpis = kpis(result.trajectory, result.scenario);
    fill_context(result);
    return result;
}

namespace {

std::vector<double> hours_axis(const Trajectory& traj) {
    std::vector<double> x(traj.horizon);
    for (int t = 0; t < traj.horizon; ++t) x[t] = (t + 1) * traj.period_minutes / 60.0;
    return x;
}

std::vector<double> per_hour(const std::vector<double>& v, double factor) {
    std::vector<double> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] * factor;
    return out;
}

void write_charts(const RunResult& result, const std::string& dir, const std::string& suffix) {
    const Trajectory& traj = result.trajectory;
    auto x = hours_axis(traj);
    double f = traj.rate_to_per_hour();
    std::string tag = std::string(to_string(traj.control)) + ", " +
                      std::string(to_string(traj.milling));

    write_text_file(dir + "/reactor_feed" + suffix + ".svg",
                    svg_line_chart("Reactor feeding rate (" + tag + ")", "hours", "dry Mg/h", x,
                                   {{"reactor feed", per_hour(traj.reactor_feed(), f)}}));
    write_text_file(dir + "/in_feed" + suffix + ".svg",
                    svg_line_chart("Bale in-feed rate (" + tag + ")", "hours", "dry Mg/h", x,
                                   {{"system in-feed", per_hour(traj.in_feed, f)}}));

    std::vector<SvgSeries> inv;
    std::vector<double> total(traj.horizon, 0.0);
    auto storage = traj.graph.storage_units();
    for (size_t p = 0; p < storage.size(); ++p) {
        SvgSeries s;
        s.label = traj.graph.equipment[storage[p]].id;
        s.y.assign(traj.horizon, 0.0);
        for (int t = 0; t < traj.horizon; ++t) {
            for (const auto& lvl : traj.inventory[p]) s.y[t] += lvl[t];
            total[t] += s.y[t];
        }
        inv.push_back(std::move(s));
    }
    inv.push_back({"total", total});
    write_text_file(dir + "/inventory" + suffix + ".svg",
                    svg_line_chart("Total inventory in storage units (" + tag + ")", "hours",
                                   "dry Mg", x, inv));
}

}  // namespace

void write_run_artifacts(const RunResult& result, const std::string& out_dir) {
    fs::create_directories(out_dir);
    write_text_file(out_dir + "/trajectory.csv", trajectory_csv(result.trajectory, result.scenario));
    write_text_file(out_dir + "/kpis.json", kpis_to_json(result.kpis));
    write_charts(result, out_dir, "");
    if (result.is_min_time)
        write_text_file(out_dir + "/iterations.csv",
                        iteration_log_csv(result.horizon_state, result.scenario.levels));
}

ComparisonReport write_compare_artifacts(const RunResult& a, const RunResult& b,
                                         const std::string& out_dir) {
    fs::create_directories(out_dir);
    write_run_artifacts(a, out_dir + "/a");
    write_run_artifacts(b, out_dir + "/b");
    ComparisonReport rep = compare(a.kpis, b.kpis);
    write_text_file(out_dir + "/comparison.json", comparison_to_json(rep));
    write_text_file(out_dir + "/comparison.txt", comparison_table(rep));
    return rep;
}

void export_model_mps(const Scenario& scenario, const RunConfig& config,
                      const std::string& mps_path) {
    Scenario sc = apply_overrides(scenario, config);
    const FeedingPattern& pattern = sc.default_pattern;
    HorizonState h = initial_horizon(sc, pattern);
    if (config.horizon_hours > 0.0) {
        double total = h.total_hours();
        if (total <= 0.0) throw InvariantError("export: scenario has no bales to process");
        for (double& b : h.budget_hours) b *= config.horizon_hours / total;
    }
    Schedule schedule = expand_pattern(sc, pattern, h.budget_hours);
    BuiltModel built = config.control == ControlMode::Bffpc
                           ? build_bffpc(sc, schedule, schedule.periods())
                           : build_hpc(sc, schedule, schedule.periods(), 0.0);
    lp::write_mps_file(built.model, mps_path);
}

}  // namespace feedflow
