#include "feedflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace feedflow {

using nlohmann::json;

std::pair<double, double> operating_cost(const Trajectory& traj, const Scenario& sc) {
    const ProcessGraph& g = traj.graph;  // milling-adjusted
    const double dt_h = traj.period_minutes / 60.0;
    const bool hpc = traj.control == ControlMode::Hpc;

    // Hourly rate per moisture level over the surviving equipment set;
    // storage units accrue the expansion-scaled rate under HPC.
    double scale = hpc ? std::pow(1.0 + traj.k_star, sc.econ.scaling_exponent) : 1.0;
    std::vector<double> hourly(sc.levels.size(), 0.0);
    for (const auto& e : g.equipment) {
        for (int s = 0; s < sc.levels.size(); ++s)
            hourly[s] += e.is_storage() ? e.unit_cost[s] * scale : e.unit_cost[s];
    }

    double total = 0.0;
    for (int t = 0; t < traj.horizon; ++t) total += hourly[traj.schedule.level_at(t)] * dt_h;

    double mass = traj.total_in_feed();
    double per_mg = mass > 0.0 ? total / mass : 0.0;
    return {total, per_mg};
}

KpiReport kpis(const Trajectory& traj, const Scenario& sc) {
    KpiReport r;
    r.scenario = sc.title.empty() ? sc.source_path : sc.title;
    r.control = std::string(to_string(traj.control));
    r.milling = std::string(to_string(traj.milling));
    r.k_star = traj.k_star;
    r.min_time_hours = traj.horizon * traj.period_minutes / 60.0;
    r.mass_processed = traj.total_in_feed();

    for (size_t p = 0; p < traj.inventory.size(); ++p) {
        double peak = 0.0;
        for (int t = 0; t < traj.horizon; ++t) {
            double tot = 0.0;
            for (const auto& level_series : traj.inventory[p]) tot += level_series[t];
            peak = std::max(peak, tot);
        }
        int e = traj.graph.storage_units().at(p);
        r.max_inventory.emplace_back(traj.graph.equipment[e].id, peak);
    }

    const auto& feed = traj.reactor_feed();
    const int T = traj.horizon;
    double sum = 0.0;
    for (double v : feed) sum += v;
    double mean = T > 0 ? sum / T : 0.0;
    r.average_feed = r.min_time_hours > 0.0 ? sum / r.min_time_hours : 0.0;
    if (mean > 0.0) {
        double var = 0.0;
        for (double v : feed) var += (v - mean) * (v - mean);
        var /= T;  // population variance
        r.cov = std::sqrt(var) / mean;
        r.cov_defined = true;
    } else {
        r.cov = std::numeric_limits<double>::quiet_NaN();
        r.cov_defined = false;
    }

    auto [total, per_mg] = operating_cost(traj, sc);
    r.cost_total = total;
    r.cost_per_mg = per_mg;
    return r;
}

namespace {

double percent_delta(double a, double b) {
    if (b == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (a - b) / b * 100.0;
}

}  // namespace

ComparisonReport compare(const KpiReport& a, const KpiReport& b) {
    ComparisonReport rep;
    rep.a = a;
    rep.b = b;
    rep.scenario_mismatch = a.scenario != b.scenario;

    auto push = [&](const std::string& name, double va, double vb) {
        rep.deltas.push_back({name, va, vb, percent_delta(va, vb)});
    };
    push("average_feed_dry_mg_h", a.average_feed, b.average_feed);
    push("cost_total", a.cost_total, b.cost_total);
    push("cost_per_dry_mg", a.cost_per_mg, b.cost_per_mg);
    push("min_time_hours", a.min_time_hours, b.min_time_hours);
    push("mass_processed_dry_mg", a.mass_processed, b.mass_processed);
    if (a.cov_defined && b.cov_defined) push("cov", a.cov, b.cov);
    for (const auto& [unit, peak] : a.max_inventory) {
        auto it = std::find_if(b.max_inventory.begin(), b.max_inventory.end(),
                               [&](const auto& kv) { return kv.first == unit; });
        if (it != b.max_inventory.end())
            push("max_inventory." + unit, peak, it->second);
    }
    if (a.cov_defined && b.cov_defined && b.cov > 0.0)
        rep.cov_reduction_percent = (b.cov - a.cov) / b.cov * 100.0;
    return rep;
}

namespace {

json report_to_json(const KpiReport& r) {
    json inv = json::object();
    for (const auto& [unit, peak] : r.max_inventory) inv[unit] = peak;
    json j{{"scenario", r.scenario},
           {"control", r.control},
           {"milling", r.milling},
           {"pattern", r.pattern},
           {"max_inventory_dry_mg", inv},
           {"average_feed_dry_mg_h", r.average_feed},
           {"cov_defined", r.cov_defined},
           {"cost_total", r.cost_total},
           {"cost_per_dry_mg", r.cost_per_mg},
           {"min_time_hours", r.min_time_hours},
           {"mass_processed_dry_mg", r.mass_processed},
           {"expansion_k", r.k_star}};
    if (r.cov_defined) j["cov"] = r.cov;
    else j["cov"] = nullptr;
    if (r.seed) j["seed"] = *r.seed;
    return j;
}

}  // namespace

std::string kpis_to_json(const KpiReport& r) { return report_to_json(r).dump(2) + "\n"; }

std::string comparison_to_json(const ComparisonReport& rep) {
    json deltas = json::array();
    for (const auto& d : rep.deltas) {
        json jd{{"metric", d.metric}, {"a", d.a}, {"b", d.b}};
        jd["percent"] = std::isnan(d.percent) ? json(nullptr) : json(d.percent);
        deltas.push_back(jd);
    }
    json j{{"a", report_to_json(rep.a)},
           {"b", report_to_json(rep.b)},
           {"deltas", deltas},
           {"scenario_mismatch", rep.scenario_mismatch}};
    if (rep.cov_reduction_percent) j["cov_reduction_percent"] = *rep.cov_reduction_percent;
    return j.dump(2) + "\n";
}

std::string comparison_table(const ComparisonReport& rep) {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-28s %14s %14s %10s\n", "metric",
                  ("a:" + rep.a.control).c_str(), ("b:" + rep.b.control).c_str(), "delta %");
    out << buf;
    out << std::string(70, '-') << "\n";
    for (const auto& d : rep.deltas) {
        if (std::isnan(d.percent))
            std::snprintf(buf, sizeof(buf), "%-28s %14.4f %14.4f %10s\n", d.metric.c_str(), d.a,
                          d.b, "n/a");
        else
            std::snprintf(buf, sizeof(buf), "%-28s %14.4f %14.4f %+10.2f\n", d.metric.c_str(),
                          d.a, d.b, d.percent);
        out << buf;
    }
    if (rep.cov_reduction_percent) {
        std::snprintf(buf, sizeof(buf), "%-28s %40.2f\n", "cov_reduction_percent",
                      *rep.cov_reduction_percent);
        out << buf;
    }
    if (rep.scenario_mismatch) out << "warning: reports come from different scenarios\n";
    return out.str();
}

}  // namespace feedflow
