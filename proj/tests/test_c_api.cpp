// Exercises the shared-library surface exactly as an external caller would:
// nothing here touches the C++ headers.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include "feedflow/feedflow.h"

namespace {

std::string data_path(const std::string& name) {
    return std::string(FEEDFLOW_DATA_DIR) + "/" + name;
}

std::string fixture_path(const std::string& name) {
    return std::string(FEEDFLOW_FIXTURE_DIR) + "/" + name;
}

struct Scenario {
    ffw_scenario* ptr = nullptr;
    ~Scenario() { ffw_scenario_free(ptr); }
};

struct Run {
    ffw_run* ptr = nullptr;
    ~Run() { ffw_run_free(ptr); }
};

}  // namespace

TEST_CASE("load, validate and free a scenario") {
    Scenario sc;
    REQUIRE(ffw_scenario_load(data_path("switchgrass_pdu.scn").c_str(), &sc.ptr) == FFW_OK);
    char* diagnostics = nullptr;
    CHECK(ffw_scenario_validate(sc.ptr, &diagnostics) == FFW_OK);
    CHECK(std::strlen(diagnostics) == 0);
    ffw_string_free(diagnostics);
}

TEST_CASE("error codes map the failure taxonomy") {
    ffw_scenario* out = nullptr;
    CHECK(ffw_scenario_load(data_path("missing.scn").c_str(), &out) == FFW_ERROR_PARSE);
    CHECK(out == nullptr);
    CHECK(std::strlen(ffw_last_error()) > 0);

    CHECK(ffw_scenario_load(fixture_path("corrupt.scn").c_str(), &out) == FFW_ERROR_PARSE);
    CHECK(ffw_scenario_load(fixture_path("bad_density.scn").c_str(), &out) ==
          FFW_ERROR_INVARIANT);
    CHECK(ffw_scenario_load(fixture_path("cyclic.scn").c_str(), &out) == FFW_ERROR_INVARIANT);
    CHECK(ffw_scenario_load(nullptr, &out) == FFW_ERROR_ARGUMENT);
}

TEST_CASE("solve through the C surface and read the results") {
    Scenario sc;
    REQUIRE(ffw_scenario_load(data_path("switchgrass_pdu.scn").c_str(), &sc.ptr) == FFW_OK);

    ffw_run_options options;
    ffw_run_options_init(&options);
    options.control = "hpc";
    options.delta_minutes = 10.0;
    options.expansion = "fixed";

    Run run;
    REQUIRE(ffw_solve(sc.ptr, &options, &run.ptr) == FFW_OK);
    int64_t periods = ffw_run_period_count(run.ptr);
    CHECK(periods > 100);
    CHECK(ffw_run_delta_minutes(run.ptr) == doctest::Approx(10.0));
    CHECK(ffw_run_expansion(run.ptr) == 0.0);

    std::vector<double> feed(periods, -1.0);
    CHECK(ffw_run_reactor_feed(run.ptr, feed.data(), periods) == periods);
    for (double v : feed) CHECK(v >= 0.0);

    char* json = nullptr;
    REQUIRE(ffw_run_kpis_json_alloc(run.ptr, &json) == FFW_OK);
    CHECK(std::string(json).find("average_feed_dry_mg_h") != std::string::npos);
    ffw_string_free(json);

    CHECK(ffw_run_write_artifacts(run.ptr, "/tmp/feedflow_capi_artifacts") == FFW_OK);
}

TEST_CASE("bad options are argument or invariant errors") {
    Scenario sc;
    REQUIRE(ffw_scenario_load(data_path("switchgrass_pdu.scn").c_str(), &sc.ptr) == FFW_OK);
    ffw_run_options options;
    ffw_run_options_init(&options);
    options.control = "granular";
    ffw_run* run = nullptr;
    CHECK(ffw_solve(sc.ptr, &options, &run) == FFW_ERROR_INVARIANT);
    CHECK(run == nullptr);
    CHECK(ffw_solve(nullptr, &options, &run) == FFW_ERROR_ARGUMENT);
}

TEST_CASE("iteration limits surface as the solver-limit status") {
    Scenario sc;
    REQUIRE(ffw_scenario_load(data_path("switchgrass_pdu.scn").c_str(), &sc.ptr) == FFW_OK);
    ffw_run_options options;
    ffw_run_options_init(&options);
    options.control = "bffpc";
    options.delta_minutes = 10.0;
    options.iteration_limit = 3;
    ffw_run* run = nullptr;
    CHECK(ffw_solve(sc.ptr, &options, &run) == FFW_ERROR_SOLVER_LIMIT);
}

TEST_CASE("compare two runs through the C surface") {
    Scenario sc;
    REQUIRE(ffw_scenario_load(data_path("switchgrass_pdu.scn").c_str(), &sc.ptr) == FFW_OK);

    ffw_run_options options;
    ffw_run_options_init(&options);
    options.delta_minutes = 10.0;
    options.expansion = "fixed";
    Run a, b;
    options.control = "hpc";
    REQUIRE(ffw_solve(sc.ptr, &options, &a.ptr) == FFW_OK);
    options.control = "bffpc";
    options.pattern = "random:seed=7";
    REQUIRE(ffw_solve(sc.ptr, &options, &b.ptr) == FFW_OK);

    char* json = nullptr;
    char* table = nullptr;
    REQUIRE(ffw_compare_alloc(a.ptr, b.ptr, nullptr, &json, &table) == FFW_OK);
    CHECK(std::string(json).find("deltas") != std::string::npos);
    CHECK(std::string(table).find("metric") != std::string::npos);
    ffw_string_free(json);
    ffw_string_free(table);
}

TEST_CASE("mps export through the C surface") {
    Scenario sc;
    REQUIRE(ffw_scenario_load(data_path("switchgrass_pdu.scn").c_str(), &sc.ptr) == FFW_OK);
    ffw_run_options options;
    ffw_run_options_init(&options);
    options.control = "hpc";
    options.delta_minutes = 10.0;
    CHECK(ffw_export_mps(sc.ptr, &options, "/tmp/feedflow_capi.mps") == FFW_OK);
}

TEST_CASE("version string is present") {
    CHECK(std::strlen(ffw_version()) > 0);
}
