#include <doctest.h>

#include <algorithm>

#include "feedflow/runner.hpp"
#include "helpers.hpp"

using namespace feedflow;
using test::data_path;

namespace {

RunResult small_run() {
    Scenario sc = test::toy_line(5.0);
    RunConfig config;
    config.control = ControlMode::Hpc;
    return run_solve(sc, config);
}

size_t count_lines(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

}  // namespace

TEST_CASE("trajectory csv has one row per period and a versioned header") {
    RunResult run = small_run();
    std::string csv = trajectory_csv(run.trajectory, run.scenario);
    CHECK(csv.rfind("# feedflow-trajectory-v1", 0) == 0);
    // Schema comment + column header + one line per period.
    CHECK(count_lines(csv) == static_cast<size_t>(run.trajectory.horizon) + 2);
    CHECK(csv.find("in_feed_dry_mg_h") != std::string::npos);
    CHECK(csv.find("inv.bin.wet") != std::string::npos);
    CHECK(csv.find("beta_plus") != std::string::npos);
}

TEST_CASE("csv output is deterministic") {
    RunResult a = small_run();
    RunResult b = small_run();
    CHECK(trajectory_csv(a.trajectory, a.scenario) == trajectory_csv(b.trajectory, b.scenario));
    CHECK(kpis_to_json(a.kpis) == kpis_to_json(b.kpis));
}

TEST_CASE("iteration log lists budgets per level") {
    Scenario sc = test::toy_line(5.0);
    RunConfig config;
    config.control = ControlMode::Bffpc;
    RunResult run = run_min_time(sc, config);
    std::string csv = iteration_log_csv(run.horizon_state, sc.levels);
    CHECK(csv.find("iter,T_wet,T_dry,feasible,objective") != std::string::npos);
    CHECK(count_lines(csv) == run.horizon_state.log.size() + 2);
}

TEST_CASE("svg charts are self-contained line plots") {
    std::vector<double> x{0.0, 1.0, 2.0, 3.0};
    std::string svg = svg_line_chart("Reactor feed", "hours", "dry Mg/h", x,
                                     {{"feed", {1.0, 2.0, 1.5, 2.5}},
                                      {"cap", {3.0, 3.0, 3.0, 3.0}}});
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(std::count(svg.begin(), svg.end(), '<') > 10);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("Reactor feed") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    // Deterministic.
    CHECK(svg == svg_line_chart("Reactor feed", "hours", "dry Mg/h", x,
                                {{"feed", {1.0, 2.0, 1.5, 2.5}},
                                 {"cap", {3.0, 3.0, 3.0, 3.0}}}));
}

TEST_CASE("run artifacts land on disk") {
    RunResult run = small_run();
    std::string dir = "/tmp/feedflow_test_artifacts";
    write_run_artifacts(run, dir);
    for (const char* name : {"/trajectory.csv", "/kpis.json", "/reactor_feed.svg",
                             "/in_feed.svg", "/inventory.svg"}) {
        INFO(name);
        CHECK_FALSE(read_text_file(dir + name).empty());
    }
}

TEST_CASE("comparison artifacts include both runs and the delta table") {
    Scenario sc = test::toy_line(5.0);
    RunConfig a, b;
    a.control = ControlMode::Hpc;
    b.control = ControlMode::Bffpc;
    RunResult ra = run_solve(sc, a);
    RunResult rb = run_solve(sc, b);
    std::string dir = "/tmp/feedflow_test_compare";
    ComparisonReport rep = write_compare_artifacts(ra, rb, dir);
    CHECK_FALSE(rep.deltas.empty());
    CHECK_FALSE(read_text_file(dir + "/comparison.json").empty());
    CHECK_FALSE(read_text_file(dir + "/comparison.txt").empty());
    CHECK_FALSE(read_text_file(dir + "/a/trajectory.csv").empty());
    CHECK_FALSE(read_text_file(dir + "/b/kpis.json").empty());
}

TEST_CASE("iteration limit env var is honored when unset in config") {
    CHECK(resolve_iteration_limit(123) == 123);
    setenv("FEEDFLOW_SOLVER_ITER_LIMIT", "777", 1);
    CHECK(resolve_iteration_limit(0) == 777);
    setenv("FEEDFLOW_SOLVER_ITER_LIMIT", "nonsense", 1);
    CHECK(resolve_iteration_limit(0) == 0);
    unsetenv("FEEDFLOW_SOLVER_ITER_LIMIT");
    CHECK(resolve_iteration_limit(0) == 0);
}

TEST_CASE("horizon override scales the solve window") {
    Scenario sc = test::toy_single(4.0, 0.5, 3, 1.0);  // needs 22.5 minutes
    RunConfig config;
    config.control = ControlMode::Bffpc;
    config.horizon_hours = 1.0;
    RunResult run = run_solve(sc, config);
    CHECK(run.trajectory.horizon == 60);

    config.horizon_hours = 0.25;  // too short
    CHECK_THROWS_AS(run_solve(sc, config), InfeasibleError);
}
