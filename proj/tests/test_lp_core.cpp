#include <doctest.h>

#include <cmath>
#include <random>

#include "feedflow/simplex.hpp"
#include "helpers.hpp"

using namespace feedflow;
using namespace feedflow::lp;

TEST_CASE("single bounded variable") {
    LpModel m;
    m.add_column("x", 0.0, kInfinity, 1.0);
    m.add_row("cap", RowSense::LessEqual, 5.0, {{0, 1.0}});
    Solution s = solve(m);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(5.0));
    CHECK(s.values[0] == doctest::Approx(5.0));
}

TEST_CASE("degenerate optimal face") {
    LpModel m;
    m.add_column("x", 0.0, kInfinity, 1.0);
    m.add_column("y", 0.0, kInfinity, 1.0);
    m.add_row("cap", RowSense::LessEqual, 1.0, {{0, 1.0}, {1, 1.0}});
    Solution s = solve(m);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(1.0));
    CHECK(s.values[0] + s.values[1] == doctest::Approx(1.0));
}

TEST_CASE("infeasible and unbounded are certified") {
    LpModel inf;
    inf.add_column("x", 0.0, 1.0, 1.0);
    inf.add_row("need", RowSense::GreaterEqual, 2.0, {{0, 1.0}});
    CHECK(solve(inf).status == SolveStatus::Infeasible);

    LpModel unb;
    unb.add_column("x", 0.0, kInfinity, 1.0);
    unb.add_row("floor", RowSense::GreaterEqual, 1.0, {{0, 1.0}});
    CHECK(solve(unb).status == SolveStatus::Unbounded);

    // Minimization with an open lower direction.
    LpModel unb2;
    unb2.objective_sense = ObjSense::Minimize;
    unb2.add_column("x", -kInfinity, 5.0, 1.0);
    unb2.add_row("r", RowSense::LessEqual, 5.0, {{0, 1.0}});
    CHECK(solve(unb2).status == SolveStatus::Unbounded);
}

TEST_CASE("empty rows decide feasibility directly") {
    LpModel m;
    m.add_column("x", 0.0, 1.0, 1.0);
    m.add_row("void", RowSense::LessEqual, -1.0, {});
    CHECK(solve(m).status == SolveStatus::Infeasible);

    LpModel ok;
    ok.add_column("x", 0.0, 1.0, 1.0);
    ok.add_row("void", RowSense::LessEqual, 1.0, {});
    Solution s = solve(ok);
    CHECK(s.status == SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(1.0));
}

TEST_CASE("iteration limit reports the incumbent") {
    LpModel m;
    for (int j = 0; j < 10; ++j) m.add_column("x" + std::to_string(j), 0.0, 1.0, 1.0);
    for (int r = 0; r < 8; ++r) {
        std::vector<std::pair<int, double>> coeffs;
        for (int j = 0; j < 10; ++j) coeffs.push_back({j, 1.0 + (r * j % 3)});
        m.add_row("r" + std::to_string(r), RowSense::LessEqual, 4.0, coeffs);
    }
    SolveOptions opt;
    opt.iteration_limit = 1;
    CHECK(solve(m, opt).status == SolveStatus::IterationLimit);
}

TEST_CASE("model validation rejects malformed input") {
    LpModel dup;
    dup.add_column("x", 0.0, 1.0, 0.0);
    dup.add_column("x", 0.0, 1.0, 0.0);
    CHECK_THROWS_AS(solve(dup), InvariantError);

    LpModel crossed;
    crossed.add_column("x", 2.0, 1.0, 0.0);
    CHECK_THROWS_AS(solve(crossed), InvariantError);

    LpModel dangling;
    dangling.add_column("x", 0.0, 1.0, 0.0);
    dangling.add_row("r", RowSense::Equal, 0.0, {{3, 1.0}});
    CHECK_THROWS_AS(solve(dangling), InvariantError);
}

TEST_CASE("fixed and free variables") {
    LpModel m;
    m.objective_sense = ObjSense::Minimize;
    m.add_column("fixed", 2.0, 2.0, 10.0);
    m.add_column("free", -kInfinity, kInfinity, 1.0);
    m.add_row("link", RowSense::Equal, 5.0, {{0, 1.0}, {1, 1.0}});
    Solution s = solve(m);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.values[0] == doctest::Approx(2.0));
    CHECK(s.values[1] == doctest::Approx(3.0));
}

TEST_CASE("objective scaling leaves the argmax intact") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        LpModel m = test::random_lp(rng);
        Solution base = solve(m);
        LpModel scaled = m;
        const double c = 3.5;
        for (double& v : scaled.objective) v *= c;
        Solution s = solve(scaled);
        CHECK(s.status == base.status);
        if (base.status == SolveStatus::Optimal) {
            CHECK(std::fabs(s.objective - c * base.objective) <=
                  1e-9 * (1.0 + std::fabs(c * base.objective)));
            CHECK(s.max_primal_infeasibility <= 1e-7);
        }
    }
}

TEST_CASE("random LPs match the vertex-enumeration oracle") {
    std::mt19937_64 rng(4242);
    int feasible = 0;
    for (int trial = 0; trial < 50; ++trial) {
        LpModel m = test::random_lp(rng);
        Solution s = solve(m);
        test::OracleResult o = test::enumerate_vertices(m);
        INFO("trial ", trial);
        if (o.feasible) {
            ++feasible;
            REQUIRE(s.status == SolveStatus::Optimal);
            CHECK(std::fabs(s.objective - o.objective) <= 1e-7 * (1.0 + std::fabs(o.objective)));
            CHECK(s.max_primal_infeasibility <= 1e-7);
        } else {
            CHECK(s.status == SolveStatus::Infeasible);
        }
    }
    // The generator is tuned to produce a healthy feasible share.
    CHECK(feasible >= 15);
}

TEST_CASE("reduced costs certify optimality") {
    // d_j = c_j - y . a_j in the model's sense: at an optimum no nonbasic
    // move improves, so for maximization a variable at its lower bound has
    // d <= tol and one at its upper bound has d >= -tol (reversed for
    // minimization).
    std::mt19937_64 rng(5150);
    int optimal = 0;
    for (int trial = 0; trial < 40; ++trial) {
        LpModel m = test::random_lp(rng);
        Solution s = solve(m);
        if (s.status != SolveStatus::Optimal) continue;
        ++optimal;
        REQUIRE(s.reduced_costs.size() == static_cast<size_t>(m.num_cols()));
        const double tol = 1e-7;
        const double sign = m.objective_sense == ObjSense::Maximize ? 1.0 : -1.0;
        for (int j = 0; j < m.num_cols(); ++j) {
            if (m.lower[j] == m.upper[j]) continue;  // fixed columns prove nothing
            if (s.at_lower[j]) CHECK(sign * s.reduced_costs[j] <= tol);
            if (s.at_upper[j]) CHECK(sign * s.reduced_costs[j] >= -tol);
        }
    }
    CHECK(optimal >= 10);
}

TEST_CASE("optimal solutions respect rows and bounds tightly") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        LpModel m = test::random_lp(rng);
        Solution s = solve(m);
        if (s.status != SolveStatus::Optimal) continue;
        auto activity = m.row_activity(s.values);
        for (int r = 0; r < m.num_rows(); ++r) {
            switch (m.rows[r].sense) {
                case RowSense::LessEqual: CHECK(activity[r] <= m.rows[r].rhs + 1e-7); break;
                case RowSense::GreaterEqual: CHECK(activity[r] >= m.rows[r].rhs - 1e-7); break;
                case RowSense::Equal:
                    CHECK(std::fabs(activity[r] - m.rows[r].rhs) <= 1e-7);
                    break;
            }
        }
        for (int j = 0; j < m.num_cols(); ++j) {
            CHECK(s.values[j] >= m.lower[j] - 1e-9);
            CHECK(s.values[j] <= m.upper[j] + 1e-9);
        }
    }
}
