#include <doctest.h>

#include <algorithm>

#include "feedflow/flowsheet.hpp"
#include "feedflow/scenario.hpp"
#include "helpers.hpp"

using namespace feedflow;
using test::data_path;

namespace {

bool any_contains(const std::vector<std::string>& diags, const char* needle) {
    return std::any_of(diags.begin(), diags.end(), [&](const std::string& d) {
        return d.find(needle) != std::string::npos;
    });
}

}  // namespace

TEST_CASE("shipped graph validates cleanly") {
    Scenario sc = load_scenario(data_path("switchgrass_pdu.scn"));
    CHECK(validate_graph(sc.graph).empty());
}

TEST_CASE("cycles are diagnosed") {
    ProcessGraph g;
    EquipmentSpec a, b;
    a.id = "bale_conveyor";
    a.max_infeed = {5.0};
    a.unit_cost = {1.0};
    b.id = "grinder";
    b.kind = EquipmentKind::Grinder;
    b.max_infeed = {5.0};
    b.unit_cost = {1.0};
    g.equipment = {a, b};
    g.predecessors = {{1}, {0}};
    auto diags = validate_graph(g);
    CHECK(any_contains(diags, "cycle"));
}

TEST_CASE("active bypass needs a designated leg") {
    Scenario sc = test::toy_line();
    // Remove the designation: the separator still has theta > 0.
    int leg = sc.graph.find("fines_leg");
    sc.graph.equipment[leg].bypass_leg = false;
    auto diags = validate_graph(sc.graph);
    CHECK(any_contains(diags, "bypass"));
}

TEST_CASE("storage preds must carry densities") {
    Scenario sc = test::toy_line();
    sc.graph.equipment[sc.graph.find("main_leg")].outflow_density.clear();
    CHECK(any_contains(validate_graph(sc.graph), "outflow density"));
}

TEST_CASE("milling mode transformation") {
    Scenario sc = load_scenario(data_path("switchgrass_pdu.scn"));

    ProcessGraph with = apply_milling_mode(sc.graph, MillingMode::WithFractional);
    CHECK(with.size() == sc.graph.size());
    CHECK(with.find("screw_conveyor_6") >= 0);

    ProcessGraph without = apply_milling_mode(sc.graph, MillingMode::WithoutFractional);
    CHECK(without.size() == sc.graph.size() - 1);
    CHECK(without.find("screw_conveyor_6") < 0);
    int sep = without.find("separation_unit");
    REQUIRE(sep >= 0);
    for (double th : without.equipment[sep].bypass_ratio) CHECK(th == 0.0);
    // The metering bin keeps a single inflow.
    int mb = without.find("metering_bin");
    CHECK(without.predecessors[mb].size() == 1);
    CHECK(validate_graph(without).empty());

    // Idempotent.
    ProcessGraph twice = apply_milling_mode(without, MillingMode::WithoutFractional);
    CHECK(twice.size() == without.size());
    CHECK(twice.terminal == without.terminal);
}

TEST_CASE("system capacity matches the worked example") {
    Scenario sc = load_scenario(data_path("switchgrass_pdu.scn"));
    CHECK(system_capacity(sc.graph, 2) == doctest::Approx(4.76));  // low: pelleting binds
    CHECK(system_capacity(sc.graph, 1) == doctest::Approx(2.80));  // medium: 2nd-stage grinder
    CHECK(system_capacity(sc.graph, 0) == doctest::Approx(1.59));  // high: 2nd-stage grinder
    for (int s = 0; s < 3; ++s) {
        double cap = system_capacity(sc.graph, s);
        bool tight = false;
        for (const auto& e : sc.graph.equipment) {
            CHECK(cap <= e.max_infeed[s] + 1e-12);
            if (e.max_infeed[s] == cap) tight = true;
        }
        CHECK(tight);
    }
}

TEST_CASE("metering density is the bypass-weighted average") {
    Scenario sc = load_scenario(data_path("switchgrass_pdu.scn"));
    int mb = sc.graph.find("metering_bin");
    auto dbar = metering_density(sc.graph, mb);
    // High moisture: 0.4048 * 0.053 + 0.5952 * 0.119.
    CHECK(dbar[0] == doctest::Approx(0.0923).epsilon(0.001));

    // Convex combination of the two stream densities.
    for (int s = 0; s < 3; ++s) {
        double lo = std::min(0.053, 0.119), hi = std::max(0.053, 0.129);
        CHECK(dbar[s] >= lo);
        CHECK(dbar[s] <= hi);
    }

    // Without fractional milling the ground stream is all there is.
    ProcessGraph without = apply_milling_mode(sc.graph, MillingMode::WithoutFractional);
    auto dbar0 = metering_density(without, without.find("metering_bin"));
    CHECK(dbar0[0] == doctest::Approx(0.119));
    CHECK(dbar0[2] == doctest::Approx(0.129));

    // theta = 1 gives the bypass density alone.
    Scenario toy = test::toy_line();
    int sep = toy.graph.find("sieve");
    toy.graph.equipment[sep].bypass_ratio = {1.0, 1.0};
    auto dbar1 = metering_density(toy.graph, toy.graph.find("bin"));
    CHECK(dbar1[0] == doctest::Approx(0.1));
    CHECK(dbar1[1] == doctest::Approx(0.15));

    // Single-inflow storage passes its stream density through.
    auto pellets = metering_density(sc.graph, sc.graph.find("storage_bin"));
    CHECK(pellets[1] == doctest::Approx(0.665));
}

TEST_CASE("max in-feed rate is bounded by the pre-buffer chain") {
    Scenario sc = load_scenario(data_path("switchgrass_pdu.scn"));
    // High moisture with fractional milling: the first-stage grinder binds at
    // 2.20 / 0.985.
    CHECK(max_infeed_rate(sc.graph, 0) == doctest::Approx(2.20 / 0.985));
    // Low moisture: first-stage grinder again (5.23 / 0.985) rather than the
    // pelleting equipment, which sits behind the metering bin.
    CHECK(max_infeed_rate(sc.graph, 2) == doctest::Approx(5.23 / 0.985));

    // Without fractional milling the second-stage grinder sees all the flow.
    ProcessGraph without = apply_milling_mode(sc.graph, MillingMode::WithoutFractional);
    CHECK(max_infeed_rate(without, 0) == doctest::Approx(1.59 / (0.985 * 0.995)));
    // And the in-feed bound is never below the system bottleneck.
    for (int s = 0; s < 3; ++s)
        CHECK(max_infeed_rate(without, s) >= system_capacity(without, s) - 1e-12);
}
