#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "feedflow/formulations.hpp"
#include "feedflow/lp_model.hpp"
#include "feedflow/scenario.hpp"

namespace feedflow::test {

inline std::string data_path(const std::string& name) {
    return std::string(FEEDFLOW_DATA_DIR) + "/" + name;
}

inline std::string fixture_path(const std::string& name) {
    return std::string(FEEDFLOW_FIXTURE_DIR) + "/" + name;
}

/// One machine, one moisture level, no buffers.
inline Scenario toy_single(double rate_mg_h, double bale_mass, long count,
                           double delta_min = 1.0) {
    Scenario sc;
    sc.title = "toy_single";
    sc.levels.labels = {"only"};
    sc.bale = {1.0, 1.0, 2.0, {bale_mass}, {0.2}, {count}};
    sc.econ = {50.0, 1.0, {0.0, 0.5, 1.0}, 0.6};
    sc.period_minutes = delta_min;
    EquipmentSpec machine;
    machine.id = "machine";
    machine.kind = EquipmentKind::Conveyor;
    machine.max_infeed = {rate_mg_h};
    machine.unit_cost = {2.0};
    sc.graph.equipment = {machine};
    sc.graph.predecessors = {{}};
    sc.graph.terminal = 0;
    sc.default_pattern.kind = FeedingPattern::Kind::Blocked;
    sc.default_pattern.blocks = {{0, count}};
    sc.default_pattern.repetitions = 1;
    sc.default_pattern.text = std::to_string(count) + "O";
    return sc;
}

/// Small two-level line with a grinder, separator, bypass leg and one buffer:
/// feed -> mill -> sieve -> {main_leg -> bin; fines_leg -> bin} -> outfeed.
inline Scenario toy_line(double delta_min = 1.0) {
    Scenario sc;
    sc.title = "toy_line";
    sc.levels.labels = {"wet", "dry"};
    sc.bale = {1.0, 1.0, 2.0, {0.5, 0.5}, {0.2, 0.25}, {4, 6}};
    sc.econ = {50.0, 1.0, {0.0, 0.5, 1.0}, 0.6};
    sc.period_minutes = delta_min;

    auto conveyor = [&](const char* id, double cap) {
        EquipmentSpec e;
        e.id = id;
        e.kind = EquipmentKind::Conveyor;
        e.max_infeed = {cap, cap};
        e.unit_cost = {1.0, 1.0};
        return e;
    };
    EquipmentSpec feed = conveyor("feed", 20.0);
    EquipmentSpec mill = conveyor("mill", 6.0);
    mill.kind = EquipmentKind::Grinder;
    mill.dry_matter_loss = 0.1;
    mill.unit_cost = {5.0, 4.0};
    EquipmentSpec sieve = conveyor("sieve", 20.0);
    sieve.kind = EquipmentKind::Separator;
    sieve.bypass_ratio = {0.25, 0.4};
    EquipmentSpec main_leg = conveyor("main_leg", 20.0);
    main_leg.outflow_density = {0.3, 0.35};
    EquipmentSpec fines_leg = conveyor("fines_leg", 20.0);
    fines_leg.bypass_leg = true;
    fines_leg.outflow_density = {0.1, 0.15};
    EquipmentSpec bin = conveyor("bin", 8.0);
    bin.kind = EquipmentKind::Storage;
    bin.mass_capacity = 2.0;
    bin.volume_capacity = 12.0;
    EquipmentSpec outfeed = conveyor("outfeed", 5.0);

    sc.graph.equipment = {feed, mill, sieve, main_leg, fines_leg, bin, outfeed};
    sc.graph.predecessors = {{}, {0}, {1}, {2}, {2}, {3, 4}, {5}};
    sc.graph.terminal = 6;
    sc.default_pattern.kind = FeedingPattern::Kind::Blocked;
    sc.default_pattern.blocks = {{1, 6}, {0, 4}};
    sc.default_pattern.repetitions = 1;
    sc.default_pattern.text = "6Dx4W";
    return sc;
}

inline std::vector<double> even_budgets(const Scenario& sc, double hours_per_level) {
    return std::vector<double>(sc.levels.size(), hours_per_level);
}

// ---------------------------------------------------------------------------
// Brute-force LP oracle: enumerate candidate vertices as intersections of
// n tight constraints (rows at equality or bounds), keep feasible ones, and
// track the best objective. Exact for bounded LPs of toy size; independent
// of the simplex implementation.

struct OracleResult {
    bool feasible = false;
    double objective = 0.0;
};

inline bool oracle_solve_square(std::vector<std::vector<double>> a, std::vector<double> b,
                                std::vector<double>& x) {
    const int n = static_cast<int>(b.size());
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        double best = 1e-9;
        for (int r = c; r < n; ++r) {
            if (std::fabs(a[r][c]) > best) {
                best = std::fabs(a[r][c]);
                piv = r;
            }
        }
        if (piv < 0) return false;
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (int r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0.0) continue;
            double f = a[r][c] / a[c][c];
            for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    x.assign(n, 0.0);
    for (int c = 0; c < n; ++c) x[c] = b[c] / a[c][c];
    return true;
}

inline OracleResult enumerate_vertices(const lp::LpModel& m) {
    const int n = m.num_cols();
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    std::vector<int> kind;  // 0 <=, 1 >=, 2 ==
    for (const auto& row : m.rows) {
        std::vector<double> a(n, 0.0);
        for (const auto& [c, v] : row.coeffs) a[c] += v;
        rows.push_back(std::move(a));
        rhs.push_back(row.rhs);
        kind.push_back(row.sense == lp::RowSense::LessEqual
                           ? 0
                           : row.sense == lp::RowSense::GreaterEqual ? 1 : 2);
    }
    for (int j = 0; j < n; ++j) {
        if (std::isfinite(m.lower[j])) {
            std::vector<double> a(n, 0.0);
            a[j] = 1.0;
            rows.push_back(std::move(a));
            rhs.push_back(m.lower[j]);
            kind.push_back(1);
        }
        if (std::isfinite(m.upper[j])) {
            std::vector<double> a(n, 0.0);
            a[j] = 1.0;
            rows.push_back(std::move(a));
            rhs.push_back(m.upper[j]);
            kind.push_back(0);
        }
    }

    const int total = static_cast<int>(rows.size());
    OracleResult out;
    const bool maximize = m.objective_sense == lp::ObjSense::Maximize;

    std::vector<int> comb;
    std::function<void(int)> rec = [&](int start) {
        if (static_cast<int>(comb.size()) == n) {
            std::vector<std::vector<double>> a;
            std::vector<double> b;
            for (int c : comb) {
                a.push_back(rows[c]);
                b.push_back(rhs[c]);
            }
            std::vector<double> x;
            if (!oracle_solve_square(a, b, x)) return;
            for (int r = 0; r < total; ++r) {
                double act = 0.0;
                for (int j = 0; j < n; ++j) act += rows[r][j] * x[j];
                if (kind[r] == 0 && act > rhs[r] + 1e-6) return;
                if (kind[r] == 1 && act < rhs[r] - 1e-6) return;
                if (kind[r] == 2 && std::fabs(act - rhs[r]) > 1e-6) return;
            }
            double obj = 0.0;
            for (int j = 0; j < n; ++j) obj += m.objective[j] * x[j];
            if (!out.feasible) {
                out.feasible = true;
                out.objective = obj;
            } else if (maximize ? obj > out.objective : obj < out.objective) {
                out.objective = obj;
            }
            return;
        }
        if (start >= total || total - start < n - static_cast<int>(comb.size())) return;
        for (int c = start; c < total; ++c) {
            comb.push_back(c);
            rec(c + 1);
            comb.pop_back();
        }
    };
    rec(0);
    return out;
}

/// Random bounded LP with integer/2 data; roughly half are built around a
/// known feasible point so the suite is not dominated by infeasible cases.
inline lp::LpModel random_lp(std::mt19937_64& rng) {
    lp::LpModel m;
    m.objective_sense = (rng() % 2) ? lp::ObjSense::Maximize : lp::ObjSense::Minimize;
    const int n = 2 + static_cast<int>(rng() % 5);
    const int nrows = 1 + static_cast<int>(rng() % 8);
    const bool anchored = rng() % 2 == 0;

    std::vector<double> anchor(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double lb = (static_cast<int>(rng() % 21) - 10) / 2.0;
        double ub = lb + static_cast<double>(rng() % 17) / 2.0;
        double c = (static_cast<int>(rng() % 41) - 20) / 4.0;
        m.add_column("x" + std::to_string(j), lb, ub, c);
        anchor[j] = lb + (ub - lb) * 0.5;
    }
    for (int r = 0; r < nrows; ++r) {
        std::vector<std::pair<int, double>> coeffs;
        double act = 0.0;
        for (int j = 0; j < n; ++j) {
            if (rng() % 3 == 0) continue;
            double v = (static_cast<int>(rng() % 21) - 10) / 2.0;
            if (v == 0.0) continue;
            coeffs.push_back({j, v});
            act += v * anchor[j];
        }
        if (coeffs.empty()) coeffs.push_back({static_cast<int>(rng() % n), 1.0});
        lp::RowSense sense = (rng() % 4 == 0) ? lp::RowSense::Equal
                             : (rng() % 2) ? lp::RowSense::LessEqual
                                           : lp::RowSense::GreaterEqual;
        double rhs;
        if (anchored) {
            double slack = static_cast<double>(rng() % 9) / 2.0;
            if (sense == lp::RowSense::LessEqual) rhs = act + slack;
            else if (sense == lp::RowSense::GreaterEqual) rhs = act - slack;
            else rhs = act;
            rhs = std::round(rhs * 2.0) / 2.0;
        } else {
            rhs = (static_cast<int>(rng() % 41) - 20) / 2.0;
        }
        m.add_row("r" + std::to_string(r), sense, rhs, std::move(coeffs));
    }
    return m;
}

}  // namespace feedflow::test
