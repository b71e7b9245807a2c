#pragma once

#include <map>
#include <string>
#include <vector>

#include "feedflow/formulations.hpp"
#include "feedflow/metrics.hpp"
#include "feedflow/mintime.hpp"

namespace feedflow {

/// Trajectory CSV: one data row per period, versioned schema line first.
std::string trajectory_csv(const Trajectory& trajectory, const Scenario& scenario);

/// Min-time iteration log: iter, per-level budgets, feasible, objective.
std::string iteration_log_csv(const HorizonState& state, const MoistureSet& levels);

struct SvgSeries {
    std::string label;
    std::vector<double> y;
};

/// Minimal static line chart; deterministic output for fixed input.
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<double>& x,
                           const std::vector<SvgSeries>& series);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace feedflow
