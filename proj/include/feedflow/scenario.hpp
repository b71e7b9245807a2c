#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "feedflow/flowsheet.hpp"

namespace feedflow {

/// Scenario file could not be read or tokenized. `line` is 1-based, 0 when
/// the locus is unknown.
struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, int line_no = 0)
        : std::runtime_error(msg), line(line_no) {}
    int line = 0;
};

/// Scenario parsed but violates a model invariant; the message names the
/// offending field and the rule.
struct InvariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Ordered set of moisture levels; order fixes the indexing of every
/// per-moisture vector in the scenario.
struct MoistureSet {
    std::vector<std::string> labels;

    int size() const { return static_cast<int>(labels.size()); }
    int find(std::string_view label) const;          // -1 when absent
    int find_prefix(std::string_view prefix) const;  // case-insensitive, -1 when ambiguous/absent
    const std::string& label(int level) const { return labels.at(level); }
};

struct BaleSpec {
    double width_m = 0.0;
    double height_m = 0.0;
    double length_m = 0.0;
    std::vector<double> mass;     // dry Mg per moisture level
    std::vector<double> density;  // dry Mg/m^3 per moisture level
    std::vector<long> count;      // bales per moisture level
};

struct EconomicParams {
    double pellet_price = 0.0;          // $/dry Mg
    double feed_adjust_penalty = 0.0;   // $ per (dry Mg/minute) of feed-rate change
    std::vector<double> expansion_options;  // fractions, starts at 0, strictly increasing
    double scaling_exponent = 0.6;
};

struct PatternBlock {
    int level = 0;
    long bales = 0;
};

/// How bales are ordered over the horizon: fixed blocks repeated, or a
/// seeded uniform shuffle of the whole bale multiset.
struct FeedingPattern {
    enum class Kind { Blocked, Random };
    Kind kind = Kind::Blocked;
    std::vector<PatternBlock> blocks;  // Blocked only
    long repetitions = 1;              // Blocked only
    std::uint64_t seed = 0;            // Random only
    std::string text;                  // original spec string
};

struct Scenario {
    std::string title;
    std::string source_path;
    MoistureSet levels;
    BaleSpec bale;
    EconomicParams econ;
    double period_minutes = 1.0;
    MillingMode milling = MillingMode::WithFractional;
    ProcessGraph graph;
    FeedingPattern default_pattern;

    double total_bale_mass(int level) const {
        return bale.mass.at(level) * static_cast<double>(bale.count.at(level));
    }
};

/// Period-indexed moisture assignment: exactly one level per period.
struct Schedule {
    std::vector<int> level_of_period;
    double period_minutes = 1.0;

    int periods() const { return static_cast<int>(level_of_period.size()); }
    int level_at(int t) const { return level_of_period.at(t); }
    double horizon_hours() const { return periods() * period_minutes / 60.0; }
    std::vector<int> periods_per_level(int nlevels) const;
};

/// Per-storage-unit expansion operating costs, $/h: value(su, level, k) =
/// c_is * (1+k)^exponent for each option k in the scenario's expansion set.
struct ExpansionCostTable {
    std::vector<int> storage_index;   // graph indices, table row order
    std::vector<double> options;      // the expansion fractions
    int nlevels = 0;
    std::vector<double> values;       // [su][level][k] flattened

    double at(int su_pos, int level, int k_pos) const {
        return values.at((static_cast<size_t>(su_pos) * nlevels + level) * options.size() + k_pos);
    }
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(std::string_view text, const std::string& origin);

/// Pattern strings: "6Lx10Mx4H*10" (blocks by count+level-letter, optional
/// repetition) or "random:seed=7".
FeedingPattern parse_pattern(std::string_view text, const MoistureSet& levels);

/// Lay the pattern over a horizon. `budget_hours[s]` is the processing time
/// granted to moisture level s; every level gets exactly
/// ceil(budget_hours[s] / period) periods.
Schedule expand_pattern(const Scenario& scenario, const FeedingPattern& pattern,
                        const std::vector<double>& budget_hours);

ExpansionCostTable derive_expansion_costs(const Scenario& scenario);

/// Biomass mass per meter of bale conveyor at period t: bale cross-section
/// times the density of the moisture level active at t (dry Mg/m).
double gamma(const Scenario& scenario, const Schedule& schedule, int t);

}  // namespace feedflow
