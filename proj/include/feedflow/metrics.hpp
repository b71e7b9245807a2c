#pragma once

#include <optional>
#include <string>
#include <vector>

#include "feedflow/formulations.hpp"

namespace feedflow {

/// The five headline metrics plus identifying context for comparisons.
struct KpiReport {
    std::string scenario;   // scenario title/path used for mismatch detection
    std::string control;
    std::string milling;
    std::string pattern;
    std::optional<std::uint64_t> seed;

    std::vector<std::pair<std::string, double>> max_inventory;  // per storage unit, dry Mg
    double average_feed = 0.0;       // dry Mg/h
    double cov = 0.0;                // coefficient of variation of the reactor feed
    bool cov_defined = true;         // false when the mean feed is zero
    double cost_total = 0.0;         // $
    double cost_per_mg = 0.0;        // $/dry Mg
    double min_time_hours = 0.0;     // horizon of the trajectory
    double mass_processed = 0.0;     // total system in-feed, dry Mg
    double k_star = 0.0;
};

KpiReport kpis(const Trajectory& trajectory, const Scenario& scenario);

/// Operating cost over the trajectory's horizon: every period accrues the
/// active moisture's hourly rate for each equipment in the (milling-adjusted)
/// graph; storage units accrue the expansion-scaled rate for the chosen k
/// under HPC. Returns (total $, $ per dry Mg processed).
std::pair<double, double> operating_cost(const Trajectory& trajectory, const Scenario& scenario);

struct KpiDelta {
    std::string metric;
    double a = 0.0;
    double b = 0.0;
    double percent = 0.0;   // (a - b) / b * 100, NaN when b == 0
};

struct ComparisonReport {
    KpiReport a;
    KpiReport b;
    std::vector<KpiDelta> deltas;
    std::optional<double> cov_reduction_percent;  // (cov_b - cov_a)/cov_b*100 when cov_b > 0
    bool scenario_mismatch = false;
};

ComparisonReport compare(const KpiReport& a, const KpiReport& b);

std::string kpis_to_json(const KpiReport& report);
std::string comparison_to_json(const ComparisonReport& report);
std::string comparison_table(const ComparisonReport& report);

}  // namespace feedflow
