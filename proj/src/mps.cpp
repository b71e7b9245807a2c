#include "feedflow/mps.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "feedflow/scenario.hpp"

namespace feedflow::lp {

namespace {

constexpr size_t kMaxName = 8;

bool mps_safe_name(const std::string& name) {
    if (name.empty() || name.size() > kMaxName) return false;
    if (!std::isalpha(static_cast<unsigned char>(name.front()))) return false;
    for (char c : name) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.') return false;
    }
    return true;
}

/// Shortest decimal text that parses back to exactly the same double.
std::string format_value(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, end);
}

void pad_to(std::string& line, size_t column) {
    while (line.size() < column) line.push_back(' ');
}

struct NameAssigner {
    std::vector<std::string> emitted;
    std::map<std::string, int> used;

    std::string assign(const std::string& original, char prefix, int index) {
        std::string name;
        if (mps_safe_name(original) && !used.count(original)) {
            name = original;
        } else {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%c%07d", prefix, index);
            name = buf;
        }
        used[name] = index;
        emitted.push_back(name);
        return name;
    }
};

}  // namespace

std::string MpsDocument::name_table_csv() const {
    std::string out = "kind,original,emitted\n";
    for (const auto& row : name_table) {
        out += row.kind;
        out += ',';
        out += row.original;
        out += ',';
        out += row.emitted;
        out += '\n';
    }
    return out;
}

MpsDocument export_mps(const LpModel& model) {
    model.validate();
    MpsDocument doc;
    std::string& out = doc.mps;
    out.reserve(64 * (model.num_rows() + model.num_cols()) + 256);

    NameAssigner rows, cols;
    for (int r = 0; r < model.num_rows(); ++r) {
        std::string name = rows.assign(model.rows[r].name, 'R', r);
        doc.name_table.push_back({"row", model.rows[r].name, name});
    }
    for (int j = 0; j < model.num_cols(); ++j) {
        std::string name = cols.assign(model.col_names[j], 'C', j);
        doc.name_table.push_back({"col", model.col_names[j], name});
    }

    out += "NAME          ";
    out += mps_safe_name(model.name) ? model.name : "FEEDFLOW";
    out += '\n';
    if (model.objective_sense == ObjSense::Maximize) {
        out += "OBJSENSE\n    MAX\n";
    }
    out += "ROWS\n";
    out += " N  OBJ\n";
    for (int r = 0; r < model.num_rows(); ++r) {
        std::string line = " ";
        line += static_cast<char>(model.rows[r].sense);
        line += "  ";
        line += rows.emitted[r];
        out += line;
        out += '\n';
    }

    // Column-major coefficient lists, one entry per line.
    std::vector<std::vector<std::pair<int, double>>> by_col(model.num_cols());
    for (int r = 0; r < model.num_rows(); ++r) {
        for (const auto& [col, val] : model.rows[r].coeffs) by_col[col].emplace_back(r, val);
    }
    out += "COLUMNS\n";
    for (int j = 0; j < model.num_cols(); ++j) {
        auto emit = [&](const std::string& row_name, double value) {
            std::string line = "    ";
            line += cols.emitted[j];
            pad_to(line, 14);
            line += row_name;
            pad_to(line, 24);
            line += format_value(value);
            out += line;
            out += '\n';
        };
        // Columns with no entries anywhere still need a declaration line.
        if (model.objective[j] != 0.0 || by_col[j].empty()) emit("OBJ", model.objective[j]);
        for (const auto& [r, val] : by_col[j]) emit(rows.emitted[r], val);
    }

    out += "RHS\n";
    for (int r = 0; r < model.num_rows(); ++r) {
        if (model.rows[r].rhs == 0.0) continue;
        std::string line = "    RHS";
        pad_to(line, 14);
        line += rows.emitted[r];
        pad_to(line, 24);
        line += format_value(model.rows[r].rhs);
        out += line;
        out += '\n';
    }

    out += "BOUNDS\n";
    for (int j = 0; j < model.num_cols(); ++j) {
        double lb = model.lower[j], ub = model.upper[j];
        auto emit = [&](const char* kind, bool with_value, double value) {
            std::string line = " ";
            line += kind;
            line += " BND";
            pad_to(line, 14);
            line += cols.emitted[j];
            if (with_value) {
                pad_to(line, 24);
                line += format_value(value);
            }
            out += line;
            out += '\n';
        };
        bool lb_zero = lb == 0.0;
        bool ub_inf = std::isinf(ub) && ub > 0;
        if (lb == ub) {
            emit("FX", true, lb);
            continue;
        }
        if (std::isinf(lb) && ub_inf) {
            emit("FR", false, 0.0);
            continue;
        }
        if (std::isinf(lb)) emit("MI", false, 0.0);
        else if (!lb_zero) emit("LO", true, lb);
        if (!ub_inf) emit("UP", true, ub);
    }
    out += "ENDATA\n";
    return doc;
}

namespace {

struct Tok {
    std::vector<std::string> fields;
    int line = 0;
};

double parse_value(const std::string& field, int line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError("MPS: bad numeric field '" + field + "'", line);
    return v;
}

}  // namespace

LpModel parse_mps(std::string_view text) {
    LpModel model;
    model.objective_sense = ObjSense::Minimize;

    enum class Section { None, ObjSense, Rows, Columns, Rhs, Ranges, Bounds, Done };
    Section section = Section::None;

    std::map<std::string, int, std::less<>> row_index;
    std::map<std::string, int, std::less<>> col_index;
    std::string obj_row_name;

    int line_no = 0;
    size_t pos = 0;
    bool saw_columns = false;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view raw = (eol == std::string_view::npos) ? text.substr(pos)
                                                               : text.substr(pos, eol - pos);
        ++line_no;
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        if (raw.empty() || raw[0] == '*') continue;

        // Section headers start in column 1.
        if (!std::isspace(static_cast<unsigned char>(raw[0]))) {
            std::string head;
            for (char c : raw) {
                if (std::isspace(static_cast<unsigned char>(c))) break;
                head.push_back(c);
            }
            if (head == "NAME") {
                std::istringstream in{std::string(raw)};
                std::string kw, nm;
                in >> kw >> nm;
                if (!nm.empty()) model.name = nm;
            } else if (head == "OBJSENSE") section = Section::ObjSense;
            else if (head == "ROWS") section = Section::Rows;
            else if (head == "COLUMNS") {
                section = Section::Columns;
                saw_columns = true;
            } else if (head == "RHS") section = Section::Rhs;
            else if (head == "RANGES") section = Section::Ranges;
            else if (head == "BOUNDS") section = Section::Bounds;
            else if (head == "ENDATA") {
                section = Section::Done;
                break;
            } else throw ParseError("MPS: unknown section '" + head + "'", line_no);
            continue;
        }

        std::istringstream in{std::string(raw)};
        std::vector<std::string> f;
        std::string fld;
        while (in >> fld) f.push_back(fld);
        if (f.empty()) continue;

        switch (section) {
            case Section::ObjSense: {
                if (f[0] == "MAX" || f[0] == "MAXIMIZE") model.objective_sense = ObjSense::Maximize;
                else if (f[0] == "MIN" || f[0] == "MINIMIZE")
                    model.objective_sense = ObjSense::Minimize;
                else throw ParseError("MPS: bad OBJSENSE '" + f[0] + "'", line_no);
                break;
            }
            case Section::Rows: {
                if (f.size() != 2) throw ParseError("MPS: ROWS line needs 2 fields", line_no);
                if (f[0] == "N") {
                    if (obj_row_name.empty()) obj_row_name = f[1];
                    // Extra free rows are ignored.
                    break;
                }
                RowSense sense;
                if (f[0] == "L") sense = RowSense::LessEqual;
                else if (f[0] == "G") sense = RowSense::GreaterEqual;
                else if (f[0] == "E") sense = RowSense::Equal;
                else throw ParseError("MPS: bad row sense '" + f[0] + "'", line_no);
                if (row_index.count(f[1]))
                    throw ParseError("MPS: duplicate row '" + f[1] + "'", line_no);
                row_index[f[1]] = model.add_row(f[1], sense, 0.0, {});
                break;
            }
            case Section::Columns: {
                if (f.size() != 3 && f.size() != 5)
                    throw ParseError("MPS: COLUMNS line needs name/row/value groups", line_no);
                auto it = col_index.find(f[0]);
                int j;
                if (it == col_index.end()) {
                    j = model.add_column(f[0], 0.0, kInfinity, 0.0);
                    col_index[f[0]] = j;
                } else {
                    j = it->second;
                }
                for (size_t g = 1; g + 1 < f.size(); g += 2) {
                    double v = parse_value(f[g + 1], line_no);
                    if (f[g] == obj_row_name) {
                        model.objective[j] = v;
                    } else {
                        auto rit = row_index.find(f[g]);
                        if (rit == row_index.end())
                            throw ParseError("MPS: unknown row '" + f[g] + "'", line_no);
                        model.rows[rit->second].coeffs.emplace_back(j, v);
                    }
                }
                break;
            }
            case Section::Rhs: {
                if (f.size() != 3 && f.size() != 5)
                    throw ParseError("MPS: RHS line needs name/row/value groups", line_no);
                for (size_t g = 1; g + 1 < f.size(); g += 2) {
                    auto rit = row_index.find(f[g]);
                    if (rit == row_index.end()) {
                        if (f[g] == obj_row_name) continue;  // objective offset unsupported
                        throw ParseError("MPS: unknown row '" + f[g] + "'", line_no);
                    }
                    model.rows[rit->second].rhs = parse_value(f[g + 1], line_no);
                }
                break;
            }
            case Section::Ranges:
                throw ParseError("MPS: RANGES section not supported", line_no);
            case Section::Bounds: {
                if (f.size() < 3) throw ParseError("MPS: BOUNDS line needs 3+ fields", line_no);
                const std::string& kind = f[0];
                auto cit = col_index.find(f[2]);
                if (cit == col_index.end())
                    throw ParseError("MPS: unknown column '" + f[2] + "'", line_no);
                int j = cit->second;
                auto value = [&]() {
                    if (f.size() < 4) throw ParseError("MPS: bound needs a value", line_no);
                    return parse_value(f[3], line_no);
                };
                if (kind == "UP") model.upper[j] = value();
                else if (kind == "LO") model.lower[j] = value();
                else if (kind == "FX") model.lower[j] = model.upper[j] = value();
                else if (kind == "FR") {
                    model.lower[j] = -kInfinity;
                    model.upper[j] = kInfinity;
                } else if (kind == "MI") model.lower[j] = -kInfinity;
                else if (kind == "PL") model.upper[j] = kInfinity;
                else if (kind == "BV") {
                    model.lower[j] = 0.0;
                    model.upper[j] = 1.0;
                } else throw ParseError("MPS: unsupported bound kind '" + kind + "'", line_no);
                break;
            }
            case Section::None:
                throw ParseError("MPS: data before any section", line_no);
            case Section::Done:
                break;
        }
    }

    if (!saw_columns || model.num_cols() == 0) throw ParseError("MPS: no variables", line_no);
    model.validate();
    return model;
}

bool structurally_equal(const LpModel& a, const LpModel& b) {
    if (a.num_cols() != b.num_cols() || a.num_rows() != b.num_rows()) return false;
    if (a.objective_sense != b.objective_sense) return false;
    for (int j = 0; j < a.num_cols(); ++j) {
        if (a.lower[j] != b.lower[j] || a.upper[j] != b.upper[j] ||
            a.objective[j] != b.objective[j])
            return false;
    }
    for (int r = 0; r < a.num_rows(); ++r) {
        const auto& ra = a.rows[r];
        const auto& rb = b.rows[r];
        if (ra.sense != rb.sense || ra.rhs != rb.rhs) return false;
        auto ca = ra.coeffs;
        auto cb = rb.coeffs;
        std::sort(ca.begin(), ca.end());
        std::sort(cb.begin(), cb.end());
        if (ca != cb) return false;
    }
    return true;
}

void write_mps_file(const LpModel& model, const std::string& path) {
    MpsDocument doc = export_mps(model);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << doc.mps;
    std::ofstream names(path + ".names.csv", std::ios::binary);
    if (!names) throw ParseError("cannot open '" + path + ".names.csv' for writing");
    names << doc.name_table_csv();
}

LpModel read_mps_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open MPS file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_mps(buf.str());
}

}  // namespace feedflow::lp
