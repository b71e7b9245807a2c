#include "feedflow/feedflow.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "feedflow/runner.hpp"

using namespace feedflow;

struct ffw_scenario {
    Scenario scenario;
};

struct ffw_run {
    RunResult result;
};

namespace {

thread_local std::string g_last_error;

ffw_status set_error(ffw_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

/// Runs `fn`, translating the library's exception taxonomy into status codes.
template <typename Fn>
ffw_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return FFW_OK;
    } catch (const ParseError& e) {
        std::string msg = e.what();
        if (e.line > 0) msg += " (line " + std::to_string(e.line) + ")";
        return set_error(FFW_ERROR_PARSE, msg);
    } catch (const InvariantError& e) {
        return set_error(FFW_ERROR_INVARIANT, e.what());
    } catch (const InfeasibleError& e) {
        return set_error(FFW_ERROR_INFEASIBLE, e.what());
    } catch (const SolverLimitError& e) {
        return set_error(FFW_ERROR_SOLVER_LIMIT, e.what());
    } catch (const std::bad_alloc&) {
        return set_error(FFW_ERROR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(FFW_ERROR_INTERNAL, e.what());
    } catch (...) {
        return set_error(FFW_ERROR_INTERNAL, "unknown error");
    }
}

RunConfig config_from(const ffw_run_options* o) {
    RunConfig c;
    if (!o) return c;
    if (o->control && *o->control) {
        std::string v = o->control;
        if (v == "bffpc") c.control = ControlMode::Bffpc;
        else if (v == "hpc") c.control = ControlMode::Hpc;
        else throw InvariantError("options.control: expected 'bffpc' or 'hpc', got '" + v + "'");
    }
    if (o->milling && *o->milling) {
        std::string v = o->milling;
        if (v == "with" || v == "with_fractional") c.milling = MillingMode::WithFractional;
        else if (v == "without" || v == "without_fractional")
            c.milling = MillingMode::WithoutFractional;
        else throw InvariantError("options.milling: expected 'with' or 'without', got '" + v + "'");
    }
    if (o->pattern && *o->pattern) c.pattern_text = o->pattern;
    if (o->delta_minutes > 0.0) c.delta_minutes = o->delta_minutes;
    if (o->horizon_hours > 0.0) c.horizon_hours = o->horizon_hours;
    if (o->expansion && *o->expansion) {
        std::string v = o->expansion;
        if (v == "optimized") c.expansion = ExpansionPolicy::Optimized;
        else if (v == "fixed") c.expansion = ExpansionPolicy::Fixed;
        else throw InvariantError("options.expansion: expected 'optimized' or 'fixed', got '" +
                                  v + "'");
    }
    c.bisect = o->bisect != 0;
    if (o->seed >= 0) c.seed = static_cast<std::uint64_t>(o->seed);
    if (o->iteration_limit > 0) c.iteration_limit = o->iteration_limit;
    if (o->threads > 0) c.threads = o->threads;
    return c;
}

}  // namespace

extern "C" {

const char* ffw_version(void) { return "0.1.0"; }

const char* ffw_last_error(void) { return g_last_error.c_str(); }

void ffw_string_free(char* s) { std::free(s); }

ffw_status ffw_scenario_load(const char* path, ffw_scenario** out) {
    if (!path || !out) return set_error(FFW_ERROR_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        auto handle = std::make_unique<ffw_scenario>();
        handle->scenario = load_scenario(path);
        *out = handle.release();
    });
}

void ffw_scenario_free(ffw_scenario* scenario) { delete scenario; }

ffw_status ffw_scenario_validate(const ffw_scenario* scenario, char** diagnostics) {
    if (diagnostics) *diagnostics = nullptr;
    if (!scenario) return set_error(FFW_ERROR_ARGUMENT, "null scenario");
    // Loading already enforced the invariants, so re-run only the graph
    // checks to surface diagnostics (callers may have built graphs by hand
    // through future APIs; today this mirrors load-time validation).
    std::string joined;
    ffw_status st = guarded([&] {
        for (const auto& d : validate_graph(scenario->scenario.graph)) {
            joined += d;
            joined += '\n';
        }
        if (diagnostics) *diagnostics = dup_string(joined);
    });
    if (st != FFW_OK) return st;
    if (joined.empty()) return FFW_OK;
    return set_error(FFW_ERROR_INVARIANT, joined);
}

void ffw_run_options_init(ffw_run_options* options) {
    if (!options) return;
    std::memset(options, 0, sizeof(*options));
    options->seed = -1;
}

ffw_status ffw_solve(const ffw_scenario* scenario, const ffw_run_options* options, ffw_run** out) {
    if (!scenario || !out) return set_error(FFW_ERROR_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        RunConfig config = config_from(options);
        auto handle = std::make_unique<ffw_run>();
        handle->result = run_solve(scenario->scenario, config);
        *out = handle.release();
    });
}

ffw_status ffw_min_time(const ffw_scenario* scenario, const ffw_run_options* options,
                        ffw_run** out) {
    if (!scenario || !out) return set_error(FFW_ERROR_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        RunConfig config = config_from(options);
        auto handle = std::make_unique<ffw_run>();
        handle->result = run_min_time(scenario->scenario, config);
        *out = handle.release();
    });
}

void ffw_run_free(ffw_run* run) { delete run; }

int64_t ffw_run_period_count(const ffw_run* run) {
    return run ? run->result.trajectory.horizon : 0;
}

double ffw_run_delta_minutes(const ffw_run* run) {
    return run ? run->result.trajectory.period_minutes : 0.0;
}

double ffw_run_horizon_hours(const ffw_run* run) {
    if (!run) return 0.0;
    return run->result.trajectory.horizon * run->result.trajectory.period_minutes / 60.0;
}

double ffw_run_expansion(const ffw_run* run) {
    return run ? run->result.trajectory.k_star : 0.0;
}

int64_t ffw_run_reactor_feed(const ffw_run* run, double* buffer, int64_t capacity) {
    if (!run) return 0;
    const auto& feed = run->result.trajectory.reactor_feed();
    double factor = run->result.trajectory.rate_to_per_hour();
    int64_t n = static_cast<int64_t>(feed.size());
    if (buffer) {
        int64_t limit = std::min(n, capacity);
        for (int64_t i = 0; i < limit; ++i) buffer[i] = feed[i] * factor;
    }
    return n;
}

ffw_status ffw_run_kpis_json_alloc(const ffw_run* run, char** out) {
    if (!run || !out) return set_error(FFW_ERROR_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { *out = dup_string(kpis_to_json(run->result.kpis)); });
}

ffw_status ffw_run_write_artifacts(const ffw_run* run, const char* out_dir) {
    if (!run || !out_dir) return set_error(FFW_ERROR_ARGUMENT, "null argument");
    return guarded([&] { write_run_artifacts(run->result, out_dir); });
}

ffw_status ffw_compare_alloc(const ffw_run* a, const ffw_run* b, const char* out_dir, char** json,
                             char** table) {
    if (!a || !b) return set_error(FFW_ERROR_ARGUMENT, "null run");
    if (json) *json = nullptr;
    if (table) *table = nullptr;
    return guarded([&] {
        ComparisonReport rep;
        if (out_dir && *out_dir) {
            rep = write_compare_artifacts(a->result, b->result, out_dir);
        } else {
            rep = compare(a->result.kpis, b->result.kpis);
        }
        if (json) *json = dup_string(comparison_to_json(rep));
        if (table) *table = dup_string(comparison_table(rep));
    });
}

ffw_status ffw_export_mps(const ffw_scenario* scenario, const ffw_run_options* options,
                          const char* mps_path) {
    if (!scenario || !mps_path) return set_error(FFW_ERROR_ARGUMENT, "null argument");
    return guarded([&] {
        RunConfig config = config_from(options);
        export_model_mps(scenario->scenario, config, mps_path);
    });
}

}  // extern "C"
