#pragma once

#include <string>
#include <vector>

#include "feedflow/lp_model.hpp"

namespace feedflow::lp {

/// One row of the name-mangling sidecar: `kind` is "row" or "col".
struct NameMapping {
    std::string kind;
    std::string original;
    std::string emitted;
};

struct MpsDocument {
    std::string mps;                     // fixed-format text, LF line endings
    std::vector<NameMapping> name_table;

    std::string name_table_csv() const;
};

/// Column-aligned fixed-format MPS with ROWS/COLUMNS/RHS/BOUNDS (plus
/// OBJSENSE for maximization). Names longer than 8 characters are replaced
/// by deterministic C/R identifiers recorded in the name table; values use
/// the shortest representation that parses back to the same double.
MpsDocument export_mps(const LpModel& model);

/// Inverse of export_mps on its own output. Throws ParseError with a line
/// number on malformed input.
LpModel parse_mps(std::string_view text);

/// Equality up to names: dimensions, bounds, objective, senses, right-hand
/// sides and coefficient lists must all match exactly.
bool structurally_equal(const LpModel& a, const LpModel& b);

void write_mps_file(const LpModel& model, const std::string& path);
LpModel read_mps_file(const std::string& path);

}  // namespace feedflow::lp
