#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace feedflow::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class RowSense : char { LessEqual = 'L', Equal = 'E', GreaterEqual = 'G' };
enum class ObjSense : char { Minimize = 'm', Maximize = 'M' };

/// Sparse linear program: bounded columns, sparse rows with a sense and a
/// finite right-hand side.
struct LpModel {
    struct Row {
        std::string name;
        RowSense sense = RowSense::LessEqual;
        double rhs = 0.0;
        std::vector<std::pair<int, double>> coeffs;  // (column, value)
    };

    std::string name = "model";
    ObjSense objective_sense = ObjSense::Maximize;
    std::vector<std::string> col_names;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> objective;
    std::vector<Row> rows;

    int num_cols() const { return static_cast<int>(col_names.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }
    std::size_t num_nonzeros() const;

    int add_column(std::string name, double lb, double ub, double obj);
    int add_row(std::string name, RowSense sense, double rhs,
                std::vector<std::pair<int, double>> coeffs);

    /// Throws InvariantError on duplicate names, dangling column references,
    /// non-finite right-hand sides, or crossed bounds.
    void validate() const;

    /// Constraint activities Ax for a full column-value vector.
    std::vector<double> row_activity(const std::vector<double>& values) const;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct Solution {
    SolveStatus status = SolveStatus::Infeasible;
    double objective = 0.0;            // in the model's objective sense
    std::vector<double> values;        // per structural column
    std::vector<double> reduced_costs; // per structural column, model sense
    std::vector<bool> at_lower;        // nonbasic-at-lower marker per column
    std::vector<bool> at_upper;
    long iterations = 0;
    long phase1_iterations = 0;
    double max_primal_infeasibility = 0.0;

    bool optimal() const { return status == SolveStatus::Optimal; }
};

std::string_view to_string(SolveStatus status);

}  // namespace feedflow::lp
