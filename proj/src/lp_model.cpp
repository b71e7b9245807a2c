#include "feedflow/lp_model.hpp"

#include <cmath>
#include <unordered_set>

#include "feedflow/scenario.hpp"

namespace feedflow::lp {

std::size_t LpModel::num_nonzeros() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.coeffs.size();
    return n;
}

int LpModel::add_column(std::string name, double lb, double ub, double obj) {
    col_names.push_back(std::move(name));
    lower.push_back(lb);
    upper.push_back(ub);
    objective.push_back(obj);
    return num_cols() - 1;
}

int LpModel::add_row(std::string name, RowSense sense, double rhs,
                     std::vector<std::pair<int, double>> coeffs) {
    rows.push_back(Row{std::move(name), sense, rhs, std::move(coeffs)});
    return num_rows() - 1;
}

void LpModel::validate() const {
    std::unordered_set<std::string_view> names;
    for (const auto& n : col_names) {
        if (!names.insert(n).second)
            throw InvariantError("lp model: duplicate column name '" + n + "'");
    }
    names.clear();
    for (const auto& r : rows) {
        if (!names.insert(r.name).second)
            throw InvariantError("lp model: duplicate row name '" + r.name + "'");
        if (!std::isfinite(r.rhs))
            throw InvariantError("lp model: row '" + r.name + "' has non-finite rhs");
        for (const auto& [col, val] : r.coeffs) {
            if (col < 0 || col >= num_cols())
                throw InvariantError("lp model: row '" + r.name +
                                     "' references undeclared column");
            if (!std::isfinite(val))
                throw InvariantError("lp model: row '" + r.name + "' has non-finite coefficient");
        }
    }
    for (int j = 0; j < num_cols(); ++j) {
        if (lower[j] > upper[j])
            throw InvariantError("lp model: column '" + col_names[j] + "' has crossed bounds");
        if (std::isnan(lower[j]) || std::isnan(upper[j]) || !std::isfinite(objective[j]))
            throw InvariantError("lp model: column '" + col_names[j] + "' has invalid data");
    }
}

std::vector<double> LpModel::row_activity(const std::vector<double>& values) const {
    std::vector<double> act(rows.size(), 0.0);
    for (size_t r = 0; r < rows.size(); ++r) {
        double a = 0.0;
        for (const auto& [col, val] : rows[r].coeffs) a += val * values.at(col);
        act[r] = a;
    }
    return act;
}

std::string_view to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::IterationLimit: return "iteration_limit";
    }
    return "unknown";
}

}  // namespace feedflow::lp
