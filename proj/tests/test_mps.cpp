#include <doctest.h>

#include <algorithm>
#include <random>

#include "feedflow/emit.hpp"
#include "feedflow/formulations.hpp"
#include "feedflow/mps.hpp"
#include "helpers.hpp"

using namespace feedflow;
using namespace feedflow::lp;

namespace {

LpModel trivial_model() {
    LpModel m;
    m.name = "TRIVIAL";
    m.add_column("x", 0.0, kInfinity, 1.0);
    m.add_row("cap", RowSense::LessEqual, 5.0, {{0, 1.0}});
    return m;
}

}  // namespace

TEST_CASE("trivial model exports the expected sections") {
    MpsDocument doc = export_mps(trivial_model());
    CHECK(doc.mps.find("ROWS\n") != std::string::npos);
    CHECK(doc.mps.find(" N  OBJ\n") != std::string::npos);
    CHECK(doc.mps.find(" L  cap\n") != std::string::npos);
    CHECK(doc.mps.find("COLUMNS\n") != std::string::npos);
    CHECK(doc.mps.find("RHS\n") != std::string::npos);
    CHECK(doc.mps.find("BOUNDS\n") != std::string::npos);
    CHECK(doc.mps.find("ENDATA\n") != std::string::npos);
    CHECK(doc.mps.find('\r') == std::string::npos);  // LF endings only
    // Short safe names survive unmangled, and the table lists them anyway.
    REQUIRE(doc.name_table.size() == 2);
    CHECK(doc.name_table[0].emitted == "cap");
    CHECK(doc.name_table[1].emitted == "x");
}

TEST_CASE("trivial round trip preserves names and structure") {
    LpModel m = trivial_model();
    LpModel back = parse_mps(export_mps(m).mps);
    CHECK(structurally_equal(m, back));
    CHECK(back.col_names[0] == "x");
    CHECK(back.rows[0].name == "cap");
}

TEST_CASE("long names are mangled deterministically") {
    LpModel m;
    m.add_column("Ms[metering_bin,high,12]", 0.0, 4.5, 0.0);
    m.add_row("inv[metering_bin,high,12]", RowSense::Equal, 0.0, {{0, 1.0}});
    MpsDocument doc1 = export_mps(m);
    MpsDocument doc2 = export_mps(m);
    CHECK(doc1.mps == doc2.mps);
    CHECK(doc1.name_table[0].emitted == "R0000000");
    CHECK(doc1.name_table[1].emitted == "C0000000");
    CHECK(doc1.name_table_csv().find("Ms[metering_bin,high,12],C0000000") != std::string::npos);
    CHECK(structurally_equal(m, parse_mps(doc1.mps)));
}

TEST_CASE("empty COLUMNS section is rejected") {
    const char* text =
        "NAME          EMPTY\n"
        "ROWS\n"
        " N  OBJ\n"
        "COLUMNS\n"
        "RHS\n"
        "ENDATA\n";
    CHECK_THROWS_WITH_AS(parse_mps(text), doctest::Contains("no variables"), ParseError);
}

TEST_CASE("malformed numeric fields carry the line number") {
    const char* text =
        "NAME          BAD\n"
        "ROWS\n"
        " N  OBJ\n"
        " L  r1\n"
        "COLUMNS\n"
        "    x         r1        abc\n"
        "ENDATA\n";
    try {
        parse_mps(text);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 6);
    }
}

TEST_CASE("unknown sections and rows are reported") {
    CHECK_THROWS_AS(parse_mps("GARBAGE\n"), ParseError);
    const char* text =
        "ROWS\n"
        " N  OBJ\n"
        "COLUMNS\n"
        "    x         nosuch    1.0\n"
        "ENDATA\n";
    CHECK_THROWS_AS(parse_mps(text), ParseError);
}

TEST_CASE("bound varieties round trip") {
    LpModel m;
    m.objective_sense = ObjSense::Minimize;
    m.add_column("a", 0.0, kInfinity, 1.0);        // default
    m.add_column("b", -1.5, 2.5, -0.25);           // LO + UP
    m.add_column("c", -kInfinity, kInfinity, 0.5); // FR
    m.add_column("d", 3.0, 3.0, 0.0);              // FX
    m.add_column("e", -kInfinity, 4.0, 0.0);       // MI + UP
    m.add_column("f", 1.0, kInfinity, 0.0);        // LO only
    m.add_row("r1", RowSense::Equal, 1.25, {{0, 1.0}, {1, -2.0}, {2, 0.5}});
    m.add_row("r2", RowSense::GreaterEqual, -2.0, {{3, 1.0}, {4, 1.0}, {5, 1.0}});
    LpModel back = parse_mps(export_mps(m).mps);
    CHECK(structurally_equal(m, back));
    CHECK(back.objective_sense == ObjSense::Minimize);
}

TEST_CASE("random models round trip exactly") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 25; ++trial) {
        LpModel m = test::random_lp(rng);
        LpModel back = parse_mps(export_mps(m).mps);
        INFO("trial ", trial);
        CHECK(structurally_equal(m, back));
    }
}

TEST_CASE("full model instance round trips through a file") {
    Scenario sc = load_scenario(test::data_path("switchgrass_pdu.scn"));
    sc.period_minutes = 10.0;
    Schedule sched = expand_pattern(sc, sc.default_pattern, {9.87, 14.0, 4.95});
    BuiltModel built = build_hpc(sc, sched, sched.periods(), 0.0);

    std::string path = "/tmp/feedflow_test_hpc.mps";
    write_mps_file(built.model, path);
    LpModel back = read_mps_file(path);
    CHECK(back.num_rows() == built.model.num_rows());
    CHECK(back.num_cols() == built.model.num_cols());
    CHECK(structurally_equal(built.model, back));

    // Sidecar exists and lists every row and column.
    std::string names = read_text_file(path + ".names.csv");
    size_t lines = std::count(names.begin(), names.end(), '\n');
    CHECK(lines == static_cast<size_t>(1 + built.model.num_rows() + built.model.num_cols()));
}
