#include "feedflow/flowsheet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "feedflow/scenario.hpp"

namespace feedflow {

int ProcessGraph::find(std::string_view id) const {
    for (int i = 0; i < size(); ++i) {
        if (equipment[i].id == id) return i;
    }
    return -1;
}

std::vector<int> ProcessGraph::successors(int i) const {
    std::vector<int> out;
    for (int j = 0; j < size(); ++j) {
        const auto& preds = predecessors[j];
        if (std::find(preds.begin(), preds.end(), i) != preds.end()) out.push_back(j);
    }
    return out;
}

std::vector<int> ProcessGraph::storage_units() const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i) {
        if (equipment[i].is_storage()) out.push_back(i);
    }
    return out;
}

std::vector<int> ProcessGraph::sources() const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i) {
        if (predecessors[i].empty()) out.push_back(i);
    }
    return out;
}

namespace {

bool has_cycle(const ProcessGraph& g, std::vector<std::string>& diagnostics) {
    const int n = g.size();
    std::vector<int> state(n, 0);  // 0 unvisited, 1 on stack, 2 done
    std::vector<int> stack;
    bool found = false;
    for (int start = 0; start < n && !found; ++start) {
        if (state[start] != 0) continue;
        stack.push_back(start);
        while (!stack.empty() && !found) {
            int v = stack.back();
            if (state[v] == 0) {
                state[v] = 1;
                for (int p : g.predecessors[v]) {
                    if (p < 0 || p >= n) continue;
                    if (state[p] == 1) {
                        diagnostics.push_back("cycle: equipment '" + g.equipment[v].id +
                                              "' and '" + g.equipment[p].id +
                                              "' are mutually upstream");
                        found = true;
                        break;
                    }
                    if (state[p] == 0) stack.push_back(p);
                }
            } else {
                state[v] = 2;
                stack.pop_back();
            }
        }
    }
    return found;
}

}  // namespace

std::vector<std::string> validate_graph(const ProcessGraph& g) {
    std::vector<std::string> diagnostics;
    const int n = g.size();
    if (n == 0) {
        diagnostics.push_back("graph: no equipment defined");
        return diagnostics;
    }
    if (static_cast<int>(g.predecessors.size()) != n) {
        diagnostics.push_back("graph: predecessor table size mismatch");
        return diagnostics;
    }

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (g.equipment[i].id == g.equipment[j].id)
                diagnostics.push_back("duplicate equipment id '" + g.equipment[i].id + "'");
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int p : g.predecessors[i]) {
            if (p < 0 || p >= n)
                diagnostics.push_back("equipment '" + g.equipment[i].id +
                                      "': predecessor index out of range");
            else if (p == i)
                diagnostics.push_back("equipment '" + g.equipment[i].id +
                                      "' lists itself as predecessor");
        }
    }

    has_cycle(g, diagnostics);

    if (g.sources().empty()) diagnostics.push_back("graph: no source equipment (every unit has predecessors)");

    // Exactly one terminal: a unit that feeds nothing downstream.
    std::vector<int> terminals;
    for (int i = 0; i < n; ++i) {
        if (g.successors(i).empty()) terminals.push_back(i);
    }
    if (terminals.size() != 1) {
        std::string ids;
        for (int t : terminals) ids += (ids.empty() ? "" : ", ") + g.equipment[t].id;
        diagnostics.push_back("graph: expected exactly one terminal equipment, found " +
                              std::to_string(terminals.size()) + (ids.empty() ? "" : " (" + ids + ")"));
    } else if (g.terminal >= 0 && g.terminal != terminals[0]) {
        diagnostics.push_back("graph: declared terminal '" + g.equipment[g.terminal].id +
                              "' has successors");
    }

    for (int i = 0; i < n; ++i) {
        const auto& e = g.equipment[i];
        if (e.is_grinder() && (e.dry_matter_loss < 0.0 || e.dry_matter_loss >= 1.0))
            diagnostics.push_back("equipment '" + e.id + "': dry matter loss must satisfy 0 <= mu < 1");
        if (e.is_separator()) {
            for (double th : e.bypass_ratio) {
                if (th < 0.0 || th > 1.0) {
                    diagnostics.push_back("equipment '" + e.id + "': bypass ratio must satisfy 0 <= theta <= 1");
                    break;
                }
            }
            // A separator with an active bypass needs a designated bypass leg
            // among its successors (the conveyor feeding a storage unit).
            bool active = std::any_of(e.bypass_ratio.begin(), e.bypass_ratio.end(),
                                      [](double th) { return th > 0.0; });
            if (active) {
                bool has_leg = false;
                for (int s : g.successors(i)) {
                    if (g.equipment[s].bypass_leg) has_leg = true;
                }
                if (!has_leg)
                    diagnostics.push_back("equipment '" + e.id +
                                          "': active bypass ratio but no successor is designated bypass leg");
            }
        }
        if (e.is_storage()) {
            if (e.mass_capacity <= 0.0)
                diagnostics.push_back("equipment '" + e.id + "': mass capacity must be > 0");
            if (e.volume_capacity <= 0.0)
                diagnostics.push_back("equipment '" + e.id + "': volume capacity must be > 0");
            for (int p : g.predecessors[i]) {
                if (p < 0 || p >= n) continue;
                if (g.equipment[p].outflow_density.empty())
                    diagnostics.push_back("equipment '" + e.id + "': predecessor '" +
                                          g.equipment[p].id + "' has no outflow density");
            }
            if (g.predecessors[i].size() > 2)
                diagnostics.push_back("equipment '" + e.id + "': storage units take at most two inflows");
            if (g.predecessors[i].size() == 2) {
                int legs = 0;
                for (int p : g.predecessors[i])
                    if (p >= 0 && p < n && g.equipment[p].bypass_leg) ++legs;
                if (legs != 1)
                    diagnostics.push_back("equipment '" + e.id +
                                          "': two inflows require exactly one bypass leg");
            }
        }
        for (double cap : e.max_infeed) {
            if (cap <= 0.0) {
                diagnostics.push_back("equipment '" + e.id + "': capacity must satisfy x > 0");
                break;
            }
        }
        if (e.bypass_leg) {
            bool from_separator = false;
            for (int p : g.predecessors[i])
                if (p >= 0 && p < n && g.equipment[p].is_separator()) from_separator = true;
            if (!from_separator)
                diagnostics.push_back("equipment '" + e.id +
                                      "': bypass leg must be fed by a separator");
        }
    }
    return diagnostics;
}

ProcessGraph apply_milling_mode(const ProcessGraph& graph, MillingMode mode) {
    if (mode == MillingMode::WithFractional) return graph;

    // Zero bypass ratios and drop bypass legs entirely.
    std::vector<int> keep;
    for (int i = 0; i < graph.size(); ++i) {
        if (!graph.equipment[i].bypass_leg) keep.push_back(i);
    }
    std::vector<int> remap(graph.size(), -1);
    for (int pos = 0; pos < static_cast<int>(keep.size()); ++pos) remap[keep[pos]] = pos;

    ProcessGraph out;
    out.equipment.reserve(keep.size());
    out.predecessors.reserve(keep.size());
    for (int i : keep) {
        EquipmentSpec spec = graph.equipment[i];
        if (spec.is_separator())
            std::fill(spec.bypass_ratio.begin(), spec.bypass_ratio.end(), 0.0);
        out.equipment.push_back(std::move(spec));
        std::vector<int> preds;
        for (int p : graph.predecessors[i]) {
            if (p >= 0 && p < graph.size() && remap[p] >= 0) preds.push_back(remap[p]);
        }
        out.predecessors.push_back(std::move(preds));
    }
    out.terminal = graph.terminal >= 0 ? remap[graph.terminal] : -1;
    return out;
}

double system_capacity(const ProcessGraph& graph, int level) {
    double cap = std::numeric_limits<double>::infinity();
    for (const auto& e : graph.equipment) {
        if (level < 0 || level >= static_cast<int>(e.max_infeed.size()))
            throw InvariantError("system_capacity: moisture level out of range for '" + e.id + "'");
        cap = std::min(cap, e.max_infeed[level]);
    }
    if (!(cap > 0.0) || !std::isfinite(cap))
        throw InvariantError("system_capacity: no positive finite capacity");
    return cap;
}

double max_infeed_rate(const ProcessGraph& graph, int level) {
    const int n = graph.size();
    // Fraction of the system in-feed flowing out of each unit, zero past
    // storage. Equipment order is topological in well-formed scenarios, but
    // iterate to a fixed point to stay order-independent.
    std::vector<double> frac(n, 0.0);
    for (int i : graph.sources()) {
        double f = 1.0;
        if (graph.equipment[i].is_grinder()) f -= graph.equipment[i].dry_matter_loss;
        frac[i] = f;
    }
    for (int pass = 0; pass < n; ++pass) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            const auto& e = graph.equipment[i];
            if (graph.predecessors[i].empty() || e.is_storage()) continue;
            double in = 0.0;
            for (int p : graph.predecessors[i]) {
                double share = frac[p];
                if (graph.equipment[p].is_separator()) {
                    double theta = graph.equipment[p].bypass_ratio[level];
                    share *= e.bypass_leg ? theta : 1.0 - theta;
                }
                in += share;
            }
            double out = e.is_grinder() ? in * (1.0 - e.dry_matter_loss) : in;
            if (std::fabs(out - frac[i]) > 1e-15) {
                frac[i] = out;
                changed = true;
            }
        }
        if (!changed) break;
    }

    double rate = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        if (graph.equipment[i].is_storage()) continue;
        if (frac[i] <= 0.0) continue;
        rate = std::min(rate, graph.equipment[i].max_infeed[level] / frac[i]);
    }
    if (!std::isfinite(rate) || rate <= 0.0)
        throw InvariantError("max_infeed_rate: no binding pre-buffer equipment");
    return rate;
}

std::vector<double> metering_density(const ProcessGraph& graph, int storage_index) {
    if (storage_index < 0 || storage_index >= graph.size() ||
        !graph.equipment[storage_index].is_storage())
        throw InvariantError("metering_density: index is not a storage unit");

    const auto& preds = graph.predecessors[storage_index];
    if (preds.empty())
        throw InvariantError("metering_density: storage unit '" +
                             graph.equipment[storage_index].id + "' has no inflow");

    auto density_of = [&](int p) -> const std::vector<double>& {
        const auto& d = graph.equipment[p].outflow_density;
        if (d.empty())
            throw InvariantError("metering_density: predecessor '" + graph.equipment[p].id +
                                 "' has no outflow density");
        return d;
    };

    if (preds.size() == 1) return density_of(preds[0]);

    int bypass = -1, ground = -1;
    for (int p : preds) {
        if (graph.equipment[p].bypass_leg) bypass = p;
        else ground = p;
    }
    if (bypass < 0 || ground < 0)
        throw InvariantError("metering_density: storage unit '" +
                             graph.equipment[storage_index].id +
                             "' needs one bypass and one ground inflow");

    // Bypass share is the separator's theta for the level being processed.
    int separator = -1;
    for (int p : graph.predecessors[bypass]) {
        if (graph.equipment[p].is_separator()) separator = p;
    }
    if (separator < 0)
        throw InvariantError("metering_density: bypass leg '" + graph.equipment[bypass].id +
                             "' is not fed by a separator");

    const auto& theta = graph.equipment[separator].bypass_ratio;
    const auto& d_bypass = density_of(bypass);
    const auto& d_ground = density_of(ground);
    std::vector<double> out(theta.size(), 0.0);
    for (size_t s = 0; s < theta.size(); ++s)
        out[s] = theta[s] * d_bypass[s] + (1.0 - theta[s]) * d_ground[s];
    return out;
}

std::string_view to_string(EquipmentKind kind) {
    switch (kind) {
        case EquipmentKind::Conveyor: return "conveyor";
        case EquipmentKind::Grinder: return "grinder";
        case EquipmentKind::Separator: return "separator";
        case EquipmentKind::Storage: return "storage";
        case EquipmentKind::Densifier: return "densifier";
        case EquipmentKind::PassThrough: return "pass_through";
    }
    return "unknown";
}

}  // namespace feedflow
