#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace feedflow {

enum class EquipmentKind {
    Conveyor,
    Grinder,
    Separator,
    Storage,
    Densifier,
    PassThrough,
};

enum class MillingMode {
    WithFractional,
    WithoutFractional,
};

/// One piece of equipment in the pre-processing line. Per-moisture vectors
/// are indexed by the scenario's moisture-level order.
struct EquipmentSpec {
    std::string id;
    EquipmentKind kind = EquipmentKind::PassThrough;
    std::vector<double> max_infeed;       // dry Mg/h per moisture level
    std::vector<double> unit_cost;        // $/h per moisture level
    double dry_matter_loss = 0.0;         // grinders only, fraction in [0,1)
    std::vector<double> bypass_ratio;     // separators only, fraction per level
    double mass_capacity = 0.0;           // storage only, dry Mg
    double volume_capacity = 0.0;         // storage only, m^3
    std::vector<double> outflow_density;  // dry Mg/m^3 per level; empty = unspecified
    bool bypass_leg = false;              // conveyor carrying the separator bypass stream

    bool is_storage() const { return kind == EquipmentKind::Storage; }
    bool is_grinder() const { return kind == EquipmentKind::Grinder; }
    bool is_separator() const { return kind == EquipmentKind::Separator; }
};

/// Directed equipment graph. Equipment order follows the scenario file; the
/// terminal unit's outflow is the reactor feeding rate.
struct ProcessGraph {
    std::vector<EquipmentSpec> equipment;
    std::vector<std::vector<int>> predecessors;  // indices into `equipment`
    int terminal = -1;

    int size() const { return static_cast<int>(equipment.size()); }
    int find(std::string_view id) const;
    std::vector<int> successors(int i) const;
    std::vector<int> storage_units() const;
    std::vector<int> sources() const;  // equipment with no predecessors
};

/// Structural checks; one human-readable diagnostic per violated rule,
/// empty when the graph is well formed.
std::vector<std::string> validate_graph(const ProcessGraph& graph);

/// WithoutFractional zeroes every separator bypass ratio and drops the bypass
/// conveyor from the graph (and hence from every cost sum). Idempotent.
ProcessGraph apply_milling_mode(const ProcessGraph& graph, MillingMode mode);

/// Bottleneck processing rate for one moisture level: min over all equipment
/// of the per-level capacity, in dry Mg/h.
double system_capacity(const ProcessGraph& graph, int level);

/// Maximum sustainable system in-feed rate while level `level` is active,
/// dry Mg/h: equipment downstream of a storage unit is decoupled by the
/// buffer, so only the pre-buffer chain binds. Each unit caps the in-feed at
/// capacity / (fraction of the in-feed reaching it).
double max_infeed_rate(const ProcessGraph& graph, int level);

/// Average density of material arriving at a storage unit, per moisture
/// level. For a bin fed by both the bypass leg and the ground stream this is
/// the bypass-ratio-weighted average of the two stream densities; a single
/// inflow passes its density through.
std::vector<double> metering_density(const ProcessGraph& graph, int storage_index);

std::string_view to_string(EquipmentKind kind);

}  // namespace feedflow
