// feedflow command line: validate scenarios, run optimal solves and the
// minimum-processing-time search, compare control modes, export MPS.
// Talks to the library exclusively through the C API.
#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "feedflow/feedflow.h"

namespace {

// Exit-code contract: 0 ok, 1 infeasible/unbounded, 2 parse, 3 invariant,
// 4 solver iteration limit.
int exit_code(ffw_status status) {
    switch (status) {
        case FFW_OK: return 0;
        case FFW_ERROR_INFEASIBLE: return 1;
        case FFW_ERROR_PARSE: return 2;
        case FFW_ERROR_INVARIANT: return 3;
        case FFW_ERROR_SOLVER_LIMIT: return 4;
        case FFW_ERROR_IO: return 2;
        case FFW_ERROR_ARGUMENT: return 2;
        case FFW_ERROR_INTERNAL: return 1;
    }
    return 1;
}

int fail(ffw_status status, const char* what) {
    std::fprintf(stderr, "feedflow: %s: %s\n", what, ffw_last_error());
    return exit_code(status);
}

struct ScenarioHandle {
    ffw_scenario* ptr = nullptr;
    ~ScenarioHandle() { ffw_scenario_free(ptr); }
};

struct RunHandle {
    ffw_run* ptr = nullptr;
    ~RunHandle() { ffw_run_free(ptr); }
};

struct SideOptions {
    std::string control = "hpc";
    std::string milling;
    std::string pattern;
    std::string expansion = "optimized";
    long long seed = -1;
};

struct CommonOptions {
    std::string scenario;
    double delta = 0.0;
    double horizon = 0.0;
    std::string out;
    std::string export_mps;
    bool bisect = false;
    long long iter_limit = 0;
    int threads = 0;
};

ffw_run_options make_options(const CommonOptions& common, const SideOptions& side) {
    ffw_run_options o;
    ffw_run_options_init(&o);
    o.control = side.control.c_str();
    o.milling = side.milling.empty() ? nullptr : side.milling.c_str();
    o.pattern = side.pattern.empty() ? nullptr : side.pattern.c_str();
    o.expansion = side.expansion.c_str();
    o.seed = side.seed;
    o.delta_minutes = common.delta;
    o.horizon_hours = common.horizon;
    o.bisect = common.bisect ? 1 : 0;
    o.iteration_limit = common.iter_limit;
    o.threads = common.threads;
    return o;
}

void add_side_flags(CLI::App* cmd, SideOptions& side, const std::string& prefix) {
    auto name = [&](const std::string& flag) { return "--" + prefix + flag; };
    cmd->add_option(name("control"), side.control, "Control mode: bffpc or hpc");
    cmd->add_option(name("milling"), side.milling, "Milling mode: with or without (scenario default)");
    cmd->add_option(name("pattern"), side.pattern,
                    "Feeding pattern, e.g. \"6Lx10Mx4H*10\" or \"random:seed=7\"");
    cmd->add_option(name("expansion"), side.expansion, "Storage expansion: optimized or fixed");
    cmd->add_option(name("seed"), side.seed, "Random-pattern seed override");
}

int print_run(const RunHandle& run, const CommonOptions& common, bool mintime) {
    char* json = nullptr;
    ffw_status st = ffw_run_kpis_json_alloc(run.ptr, &json);
    if (st != FFW_OK) return fail(st, "kpis");
    std::printf("%s", json);
    ffw_string_free(json);
    if (mintime)
        std::printf("minimum processing time: %.2f hours (%lld periods of %.4g min)\n",
                    ffw_run_horizon_hours(run.ptr),
                    static_cast<long long>(ffw_run_period_count(run.ptr)),
                    ffw_run_delta_minutes(run.ptr));
    if (!common.out.empty()) {
        st = ffw_run_write_artifacts(run.ptr, common.out.c_str());
        if (st != FFW_OK) return fail(st, "artifacts");
        std::printf("artifacts written to %s\n", common.out.c_str());
    }
    return 0;
}

void write_reason_file(const CommonOptions& common, const char* reason) {
    if (common.out.empty()) return;
    std::string cmd = "mkdir -p '" + common.out + "'";
    (void)std::system(cmd.c_str());
    std::string path = common.out + "/reason.txt";
    if (FILE* f = std::fopen(path.c_str(), "wb")) {
        std::fprintf(f, "%s\n", reason);
        std::fclose(f);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal control for a biomass pre-processing line"};
    app.require_subcommand(1);

    CommonOptions common;
    SideOptions side, side_b;
    std::string compare_mode = "mintime";

    auto add_common = [&](CLI::App* cmd, bool with_out = true) {
        cmd->add_option("--scenario", common.scenario, "Scenario file")->required();
        cmd->add_option("--delta", common.delta, "Period length in minutes (1, 5 or 10)");
        if (with_out) cmd->add_option("--out", common.out, "Output directory for artifacts");
        cmd->add_option("--iter-limit", common.iter_limit,
                        "Solver iteration limit (FEEDFLOW_SOLVER_ITER_LIMIT overrides 0)");
        cmd->add_option("--threads", common.threads, "Worker threads for the expansion sweep");
    };

    CLI::App* validate = app.add_subcommand("validate", "Check a scenario file and its graph");
    validate->add_option("--scenario", common.scenario, "Scenario file")->required();

    CLI::App* solve = app.add_subcommand("solve", "Solve one control problem at a fixed horizon");
    add_common(solve);
    add_side_flags(solve, side, "");
    solve->add_option("--horizon", common.horizon, "Horizon override in hours");
    solve->add_option("--export-mps", common.export_mps, "Also write the model as fixed MPS");

    CLI::App* mintime = app.add_subcommand("mintime", "Minimum time to process all bales");
    add_common(mintime);
    add_side_flags(mintime, side, "");
    mintime->add_flag("--bisect", common.bisect, "Bisection search instead of linear decrement");
    mintime->add_option("--export-mps", common.export_mps, "Also write the model as fixed MPS");

    CLI::App* cmp = app.add_subcommand("compare", "Run two configurations and diff their KPIs");
    add_common(cmp);
    cmp->add_option("--mode", compare_mode, "mintime (default) or solve");
    cmp->add_flag("--bisect", common.bisect, "Bisection search for mintime comparisons");
    add_side_flags(cmp, side, "a-");
    add_side_flags(cmp, side_b, "b-");

    CLI11_PARSE(app, argc, argv);

    if (common.delta != 0.0 && common.delta != 1.0 && common.delta != 5.0 &&
        common.delta != 10.0) {
        std::fprintf(stderr, "feedflow: --delta must be 1, 5 or 10 minutes\n");
        return 2;
    }

    ScenarioHandle scenario;
    ffw_status st = ffw_scenario_load(common.scenario.c_str(), &scenario.ptr);
    if (st != FFW_OK) return fail(st, common.scenario.c_str());

    if (validate->parsed()) {
        char* diagnostics = nullptr;
        st = ffw_scenario_validate(scenario.ptr, &diagnostics);
        if (st == FFW_OK) {
            std::printf("ok: %s\n", common.scenario.c_str());
            ffw_string_free(diagnostics);
            return 0;
        }
        std::fprintf(stderr, "invalid scenario:\n%s", diagnostics ? diagnostics : "");
        ffw_string_free(diagnostics);
        return exit_code(st);
    }

    if (solve->parsed() || mintime->parsed()) {
        ffw_run_options options = make_options(common, side);
        if (!common.export_mps.empty()) {
            st = ffw_export_mps(scenario.ptr, &options, common.export_mps.c_str());
            if (st != FFW_OK) return fail(st, "export-mps");
            std::printf("model written to %s\n", common.export_mps.c_str());
        }
        RunHandle run;
        st = solve->parsed() ? ffw_solve(scenario.ptr, &options, &run.ptr)
                             : ffw_min_time(scenario.ptr, &options, &run.ptr);
        if (st != FFW_OK) {
            write_reason_file(common, ffw_last_error());
            return fail(st, solve->parsed() ? "solve" : "mintime");
        }
        return print_run(run, common, mintime->parsed());
    }

    if (cmp->parsed()) {
        ffw_run_options oa = make_options(common, side);
        ffw_run_options ob = make_options(common, side_b);
        RunHandle ra, rb;
        bool use_mintime = compare_mode == "mintime";
        st = use_mintime ? ffw_min_time(scenario.ptr, &oa, &ra.ptr)
                         : ffw_solve(scenario.ptr, &oa, &ra.ptr);
        if (st != FFW_OK) {
            write_reason_file(common, ffw_last_error());
            return fail(st, "compare (side a)");
        }
        st = use_mintime ? ffw_min_time(scenario.ptr, &ob, &rb.ptr)
                         : ffw_solve(scenario.ptr, &ob, &rb.ptr);
        if (st != FFW_OK) {
            write_reason_file(common, ffw_last_error());
            return fail(st, "compare (side b)");
        }
        char* json = nullptr;
        char* table = nullptr;
        st = ffw_compare_alloc(ra.ptr, rb.ptr, common.out.empty() ? nullptr : common.out.c_str(),
                               &json, &table);
        if (st != FFW_OK) return fail(st, "compare");
        std::printf("%s", table);
        ffw_string_free(json);
        ffw_string_free(table);
        if (!common.out.empty()) std::printf("artifacts written to %s\n", common.out.c_str());
        return 0;
    }
    return 0;
}
