#include "feedflow/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace feedflow {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// ---------------------------------------------------------------------------
// Scenario file values: scalar, string, array, or inline table.

struct Value {
    enum class Kind { Number, String, Array, Table } kind = Kind::Number;
    double number = 0.0;
    std::string text;
    std::vector<Value> array;
    std::vector<std::pair<std::string, Value>> table;
    int line = 0;
};

class Cursor {
public:
    Cursor(std::string_view s, int line) : s_(s), line_(line) {}

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }
    bool done() {
        skip_ws();
        return pos_ >= s_.size();
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    char take() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of value");
        return s_[pos_++];
    }
    void expect(char c) {
        char got = take();
        if (got != c) fail(std::string("expected '") + c + "', found '" + got + "'");
    }
    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line_); }

    std::string bare_token() {
        skip_ws();
        size_t b = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                    s_[pos_] == '_' || s_[pos_] == '.' || s_[pos_] == '-' ||
                                    s_[pos_] == '+'))
            ++pos_;
        if (pos_ == b) fail("expected a token");
        return std::string(s_.substr(b, pos_ - b));
    }

    Value parse_value() {
        Value v;
        v.line = line_;
        char c = peek();
        if (c == '"') {
            take();
            std::string out;
            while (pos_ < s_.size() && s_[pos_] != '"') out.push_back(s_[pos_++]);
            if (pos_ >= s_.size()) fail("unterminated string");
            ++pos_;
            v.kind = Value::Kind::String;
            v.text = std::move(out);
            return v;
        }
        if (c == '[') {
            take();
            v.kind = Value::Kind::Array;
            if (peek() == ']') {
                take();
                return v;
            }
            while (true) {
                v.array.push_back(parse_value());
                char d = take();
                if (d == ']') break;
                if (d != ',') fail("expected ',' or ']' in array");
            }
            return v;
        }
        if (c == '{') {
            take();
            v.kind = Value::Kind::Table;
            if (peek() == '}') {
                take();
                return v;
            }
            while (true) {
                std::string key = bare_token();
                expect('=');
                v.table.emplace_back(std::move(key), parse_value());
                char d = take();
                if (d == '}') break;
                if (d != ',') fail("expected ',' or '}' in table");
            }
            return v;
        }
        std::string tok = bare_token();
        if (tok == "true" || tok == "false") {
            v.kind = Value::Kind::Number;
            v.number = (tok == "true") ? 1.0 : 0.0;
            return v;
        }
        double num = 0.0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), num);
        if (ec != std::errc() || ptr != tok.data() + tok.size())
            fail("'" + tok + "' is not a number");
        v.kind = Value::Kind::Number;
        v.number = num;
        return v;
    }

private:
    std::string_view s_;
    size_t pos_ = 0;
    int line_;
};

struct Section {
    std::map<std::string, Value> entries;
    std::vector<std::string> order;  // insertion order of keys
    int line = 0;
};

struct Document {
    std::map<std::string, Section> sections;  // "" = top level
    std::vector<std::string> section_order;
};

Document tokenize(std::string_view text) {
    Document doc;
    doc.sections[""] = Section{};
    doc.section_order.push_back("");
    std::string current;

    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view raw = (eol == std::string_view::npos)
                                   ? text.substr(pos)
                                   : text.substr(pos, eol - pos);
        ++line_no;
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;

        // Strip comments outside quotes.
        bool in_quote = false;
        std::string_view line = raw;
        for (size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] == '"') in_quote = !in_quote;
            else if (raw[i] == '#' && !in_quote) {
                line = raw.substr(0, i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError("unterminated section header", line_no);
            std::string name(trim(line.substr(1, line.size() - 2)));
            if (name.empty()) throw ParseError("empty section name", line_no);
            if (!doc.sections.count(name)) {
                doc.sections[name] = Section{};
                doc.sections[name].line = line_no;
                doc.section_order.push_back(name);
            }
            current = name;
            continue;
        }

        size_t eq = std::string_view::npos;
        in_quote = false;
        for (size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_quote = !in_quote;
            else if (line[i] == '=' && !in_quote) {
                eq = i;
                break;
            }
        }
        if (eq == std::string_view::npos)
            throw ParseError("expected 'key = value'", line_no);
        std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw ParseError("missing key before '='", line_no);

        Cursor cur(trim(line.substr(eq + 1)), line_no);
        Value v = cur.parse_value();
        if (!cur.done()) cur.fail("trailing characters after value");
        auto& sec = doc.sections[current];
        if (sec.entries.count(key))
            throw ParseError("duplicate key '" + key + "'", line_no);
        sec.order.push_back(key);
        sec.entries[key] = std::move(v);
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Typed extraction

class SectionReader {
public:
    SectionReader(const Section& s, std::string name) : s_(s), name_(std::move(name)) {}

    bool has(const std::string& key) const { return s_.entries.count(key) > 0; }

    const Value& get(const std::string& key) const {
        auto it = s_.entries.find(key);
        if (it == s_.entries.end())
            throw ParseError("[" + name_ + "]: missing key '" + key + "'", s_.line);
        return it->second;
    }

    double number(const std::string& key) const {
        const Value& v = get(key);
        if (v.kind != Value::Kind::Number)
            throw ParseError("[" + name_ + "]." + key + ": expected a number", v.line);
        return v.number;
    }

    double number_or(const std::string& key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }

    std::string text(const std::string& key) const {
        const Value& v = get(key);
        if (v.kind != Value::Kind::String)
            throw ParseError("[" + name_ + "]." + key + ": expected a string", v.line);
        return v.text;
    }

    std::vector<std::string> string_array(const std::string& key) const {
        const Value& v = get(key);
        if (v.kind != Value::Kind::Array)
            throw ParseError("[" + name_ + "]." + key + ": expected an array", v.line);
        std::vector<std::string> out;
        for (const Value& e : v.array) {
            if (e.kind != Value::Kind::String)
                throw ParseError("[" + name_ + "]." + key + ": expected strings", e.line);
            out.push_back(e.text);
        }
        return out;
    }

    std::vector<double> number_array(const std::string& key) const {
        const Value& v = get(key);
        if (v.kind != Value::Kind::Array)
            throw ParseError("[" + name_ + "]." + key + ": expected an array", v.line);
        std::vector<double> out;
        for (const Value& e : v.array) {
            if (e.kind != Value::Kind::Number)
                throw ParseError("[" + name_ + "]." + key + ": expected numbers", e.line);
            out.push_back(e.number);
        }
        return out;
    }

    /// Per-moisture table {high=..., low=...}; a plain number is broadcast to
    /// every level.
    std::vector<double> per_level(const std::string& key, const MoistureSet& levels) const {
        const Value& v = get(key);
        if (v.kind == Value::Kind::Number)
            return std::vector<double>(levels.size(), v.number);
        if (v.kind != Value::Kind::Table)
            throw ParseError("[" + name_ + "]." + key + ": expected {level = value, ...}", v.line);
        std::vector<double> out(levels.size(), std::nan(""));
        for (const auto& [lk, lv] : v.table) {
            int idx = levels.find(lower(lk));
            if (idx < 0)
                throw ParseError("[" + name_ + "]." + key + ": unknown moisture level '" + lk + "'",
                                 lv.line);
            if (lv.kind != Value::Kind::Number)
                throw ParseError("[" + name_ + "]." + key + "." + lk + ": expected a number", lv.line);
            out[idx] = lv.number;
        }
        for (int s = 0; s < levels.size(); ++s) {
            if (std::isnan(out[s]))
                throw ParseError("[" + name_ + "]." + key + ": missing moisture level '" +
                                     levels.label(s) + "'",
                                 v.line);
        }
        return out;
    }

    const Section& raw() const { return s_; }

private:
    const Section& s_;
    std::string name_;
};

EquipmentKind parse_kind(const std::string& text, const std::string& where, int line) {
    std::string k = lower(text);
    if (k == "conveyor") return EquipmentKind::Conveyor;
    if (k == "grinder") return EquipmentKind::Grinder;
    if (k == "separator") return EquipmentKind::Separator;
    if (k == "storage") return EquipmentKind::Storage;
    if (k == "densifier") return EquipmentKind::Densifier;
    if (k == "pass_through") return EquipmentKind::PassThrough;
    throw ParseError(where + ": unknown equipment kind '" + text + "'", line);
}

void check_invariants(const Scenario& sc) {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw InvariantError(msg);
    };

    require(sc.levels.size() >= 1, "moisture_levels: at least one level must be defined");
    for (int i = 0; i < sc.levels.size(); ++i)
        for (int j = i + 1; j < sc.levels.size(); ++j)
            require(sc.levels.labels[i] != sc.levels.labels[j],
                    "moisture_levels: labels must be unique");

    require(sc.bale.width_m > 0.0, "bale.width_m: violates w > 0");
    require(sc.bale.height_m > 0.0, "bale.height_m: violates h > 0");
    require(sc.bale.length_m > 0.0, "bale.length_m: violates length > 0");
    for (int s = 0; s < sc.levels.size(); ++s) {
        const std::string& l = sc.levels.label(s);
        require(sc.bale.mass[s] > 0.0, "bale.mass_dry_mg[" + l + "]: violates q_s > 0");
        require(sc.bale.density[s] > 0.0, "bale.density_dry_mg_m3[" + l + "]: violates d_s > 0");
        require(sc.bale.count[s] >= 0, "bale.count[" + l + "]: violates n_s >= 0");
    }

    require(sc.econ.pellet_price > 0.0, "economics.pellet_price_per_dry_mg: violates eta > 0");
    require(sc.econ.feed_adjust_penalty >= 0.0,
            "economics.feed_adjustment_penalty: violates alpha >= 0");
    const auto& opts = sc.econ.expansion_options;
    require(!opts.empty() && opts.front() == 0.0,
            "economics.expansion_options: the option set must contain 0");
    for (size_t i = 0; i < opts.size(); ++i) {
        require(opts[i] >= 0.0 && opts[i] <= 1.0,
                "economics.expansion_options: entries must lie in [0, 1]");
        if (i > 0)
            require(opts[i] > opts[i - 1],
                    "economics.expansion_options: entries must be strictly increasing");
    }
    require(sc.econ.scaling_exponent > 0.0, "economics.scaling_exponent: must be > 0");
    require(sc.period_minutes > 0.0, "period_minutes: violates delta > 0");

    for (const auto& e : sc.graph.equipment) {
        require(static_cast<int>(e.max_infeed.size()) == sc.levels.size(),
                "equipment." + e.id + ".max_infeed: one value per moisture level");
        require(static_cast<int>(e.unit_cost.size()) == sc.levels.size(),
                "equipment." + e.id + ".cost_per_h: one value per moisture level");
        for (int s = 0; s < sc.levels.size(); ++s) {
            require(e.max_infeed[s] > 0.0,
                    "equipment." + e.id + ".max_infeed[" + sc.levels.label(s) +
                        "]: violates x > 0");
            require(e.unit_cost[s] >= 0.0,
                    "equipment." + e.id + ".cost_per_h[" + sc.levels.label(s) +
                        "]: violates c >= 0");
        }
    }

    auto diags = validate_graph(sc.graph);
    if (!diags.empty()) {
        std::string msg = "process graph invalid:";
        for (const auto& d : diags) msg += "\n  - " + d;
        throw InvariantError(msg);
    }
}

}  // namespace

int MoistureSet::find(std::string_view label) const {
    for (int i = 0; i < size(); ++i)
        if (labels[i] == label) return i;
    return -1;
}

int MoistureSet::find_prefix(std::string_view prefix) const {
    std::string p = lower(prefix);
    int match = -1;
    for (int i = 0; i < size(); ++i) {
        std::string l = lower(labels[i]);
        if (l.size() >= p.size() && l.compare(0, p.size(), p) == 0) {
            if (match >= 0) return -1;  // ambiguous
            match = i;
        }
    }
    return match;
}

std::vector<int> Schedule::periods_per_level(int nlevels) const {
    std::vector<int> out(nlevels, 0);
    for (int lv : level_of_period) {
        if (lv >= 0 && lv < nlevels) ++out[lv];
    }
    return out;
}

Scenario parse_scenario(std::string_view text, const std::string& origin) {
    Document doc = tokenize(text);

    Scenario sc;
    sc.source_path = origin;

    SectionReader top(doc.sections.at(""), "top level");
    if (top.has("title")) sc.title = top.text("title");
    for (const auto& l : top.string_array("moisture_levels")) sc.levels.labels.push_back(lower(l));
    sc.period_minutes = top.number_or("period_minutes", 1.0);
    if (top.has("milling")) {
        std::string m = lower(top.text("milling"));
        if (m == "with_fractional" || m == "with") sc.milling = MillingMode::WithFractional;
        else if (m == "without_fractional" || m == "without")
            sc.milling = MillingMode::WithoutFractional;
        else throw ParseError("milling: expected with_fractional or without_fractional",
                              top.get("milling").line);
    }

    if (!doc.sections.count("bale")) throw ParseError("missing [bale] section");
    SectionReader bale(doc.sections.at("bale"), "bale");
    sc.bale.width_m = bale.number("width_m");
    sc.bale.height_m = bale.number("height_m");
    sc.bale.length_m = bale.number("length_m");
    sc.bale.mass = bale.per_level("mass_dry_mg", sc.levels);
    sc.bale.density = bale.per_level("density_dry_mg_m3", sc.levels);
    for (double c : bale.per_level("count", sc.levels))
        sc.bale.count.push_back(static_cast<long>(std::llround(c)));

    if (!doc.sections.count("economics")) throw ParseError("missing [economics] section");
    SectionReader econ(doc.sections.at("economics"), "economics");
    sc.econ.pellet_price = econ.number("pellet_price_per_dry_mg");
    sc.econ.feed_adjust_penalty = econ.number("feed_adjustment_penalty");
    sc.econ.expansion_options = econ.number_array("expansion_options");
    sc.econ.scaling_exponent = econ.number_or("scaling_exponent", 0.6);

    // Equipment sections in file order.
    std::vector<std::string> equipment_sections;
    for (const auto& name : doc.section_order) {
        if (name.rfind("equipment.", 0) == 0) equipment_sections.push_back(name);
    }
    if (equipment_sections.empty()) throw ParseError("no [equipment.<id>] sections");

    std::vector<std::vector<std::string>> pred_ids;
    for (const auto& name : equipment_sections) {
        SectionReader eq(doc.sections.at(name), name);
        EquipmentSpec spec;
        spec.id = name.substr(std::string("equipment.").size());
        if (spec.id.empty()) throw ParseError("equipment section with empty id",
                                              doc.sections.at(name).line);
        spec.kind = parse_kind(eq.text("kind"), name, eq.get("kind").line);
        spec.max_infeed = eq.per_level("max_infeed_dry_mg_h", sc.levels);
        spec.unit_cost = eq.per_level("cost_per_h", sc.levels);
        if (spec.is_grinder()) spec.dry_matter_loss = eq.number("dry_matter_loss");
        if (spec.is_separator()) spec.bypass_ratio = eq.per_level("bypass_ratio", sc.levels);
        if (spec.is_storage()) {
            spec.mass_capacity = eq.number("mass_capacity_dry_mg");
            spec.volume_capacity = eq.number("volume_capacity_m3");
        }
        if (eq.has("outflow_density_dry_mg_m3"))
            spec.outflow_density = eq.per_level("outflow_density_dry_mg_m3", sc.levels);
        if (eq.has("bypass_leg")) spec.bypass_leg = eq.number("bypass_leg") != 0.0;
        pred_ids.push_back(eq.string_array("predecessors"));
        sc.graph.equipment.push_back(std::move(spec));
    }
    for (size_t i = 0; i < pred_ids.size(); ++i) {
        std::vector<int> preds;
        for (const auto& pid : pred_ids[i]) {
            int idx = sc.graph.find(pid);
            if (idx < 0)
                throw ParseError("equipment." + sc.graph.equipment[i].id +
                                     ".predecessors: unknown equipment '" + pid + "'",
                                 doc.sections.at(equipment_sections[i]).line);
            preds.push_back(idx);
        }
        sc.graph.predecessors.push_back(std::move(preds));
    }
    for (int i = 0; i < sc.graph.size(); ++i) {
        if (sc.graph.successors(i).empty()) sc.graph.terminal = i;
    }

    if (doc.sections.count("pattern")) {
        SectionReader pat(doc.sections.at("pattern"), "pattern");
        sc.default_pattern = parse_pattern(pat.text("default"), sc.levels);
    } else {
        sc.default_pattern.kind = FeedingPattern::Kind::Random;
        sc.default_pattern.seed = 1;
        sc.default_pattern.text = "random:seed=1";
    }

    check_invariants(sc);
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

FeedingPattern parse_pattern(std::string_view text, const MoistureSet& levels) {
    FeedingPattern p;
    p.text = std::string(trim(text));
    std::string body = lower(trim(text));
    if (body.empty()) throw ParseError("empty pattern string");

    if (body.rfind("random", 0) == 0) {
        p.kind = FeedingPattern::Kind::Random;
        p.seed = 0;
        size_t colon = body.find(':');
        if (colon != std::string::npos) {
            std::string_view rest = std::string_view(body).substr(colon + 1);
            if (rest.rfind("seed=", 0) != 0)
                throw ParseError("random pattern: expected 'random:seed=<n>'");
            rest.remove_prefix(5);
            std::uint64_t seed = 0;
            auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), seed);
            if (ec != std::errc() || ptr != rest.data() + rest.size())
                throw ParseError("random pattern: bad seed '" + std::string(rest) + "'");
            p.seed = seed;
        }
        return p;
    }

    p.kind = FeedingPattern::Kind::Blocked;
    // "<count><level-letter(s)>" blocks separated by 'x' or ',',
    // optionally "*<repetitions>".
    std::string blocks_part = body;
    size_t star = body.find('*');
    if (star != std::string::npos) {
        std::string reps = std::string(trim(std::string_view(body).substr(star + 1)));
        long r = 0;
        auto [ptr, ec] = std::from_chars(reps.data(), reps.data() + reps.size(), r);
        if (ec != std::errc() || ptr != reps.data() + reps.size() || r <= 0)
            throw ParseError("pattern: bad repetition count '" + reps + "'");
        p.repetitions = r;
        blocks_part = body.substr(0, star);
    }

    size_t pos = 0;
    auto skip_seps = [&] {
        while (pos < blocks_part.size() &&
               (blocks_part[pos] == 'x' || blocks_part[pos] == ',' || blocks_part[pos] == ' '))
            ++pos;
    };
    skip_seps();
    while (pos < blocks_part.size()) {
        size_t b = pos;
        while (pos < blocks_part.size() && std::isdigit(static_cast<unsigned char>(blocks_part[pos])))
            ++pos;
        if (pos == b) throw ParseError("pattern: expected a bale count at '" +
                                       blocks_part.substr(b) + "'");
        long count = std::stol(blocks_part.substr(b, pos - b));
        size_t lb = pos;
        while (pos < blocks_part.size() &&
               std::isalpha(static_cast<unsigned char>(blocks_part[pos])))
            ++pos;
        // A level token may swallow a following block separator 'x' (e.g.
        // "6lx10m"): try the longest prefix that resolves to a level.
        std::string letters = blocks_part.substr(lb, pos - lb);
        if (letters.empty()) throw ParseError("pattern: expected a moisture letter after count");
        int level = -1;
        size_t used = 0;
        for (size_t len = letters.size(); len >= 1; --len) {
            int idx = levels.find_prefix(std::string_view(letters).substr(0, len));
            if (idx >= 0) {
                level = idx;
                used = len;
                break;
            }
        }
        if (level < 0)
            throw ParseError("pattern: no moisture level matches '" + letters + "'");
        pos = lb + used;
        p.blocks.push_back({level, count});
        skip_seps();
    }
    if (p.blocks.empty()) throw ParseError("pattern: no blocks found");
    return p;
}

namespace {

int periods_for_budget(double budget_hours, double period_minutes) {
    double periods = budget_hours * 60.0 / period_minutes;
    return static_cast<int>(std::ceil(periods - 1e-9));
}

/// Cumulative-floor split of `total` periods across weights: piece i covers
/// [floor(cum_{i-1} * total), floor(cum_i * total)), final piece absorbs the
/// remainder exactly.
std::vector<int> cumulative_split(int total, const std::vector<double>& weights) {
    double sum = 0.0;
    for (double w : weights) sum += w;
    std::vector<int> out(weights.size(), 0);
    if (sum <= 0.0 || total <= 0) return out;
    double cum = 0.0;
    int prev = 0;
    for (size_t i = 0; i < weights.size(); ++i) {
        cum += weights[i];
        int edge = (i + 1 == weights.size())
                       ? total
                       : static_cast<int>(std::floor(cum / sum * total + 1e-9));
        out[i] = edge - prev;
        prev = edge;
    }
    return out;
}

}  // namespace

Schedule expand_pattern(const Scenario& sc, const FeedingPattern& pattern,
                        const std::vector<double>& budget_hours) {
    const int nlevels = sc.levels.size();
    if (static_cast<int>(budget_hours.size()) != nlevels)
        throw InvariantError("expand_pattern: one budget per moisture level required");
    for (int s = 0; s < nlevels; ++s) {
        if (sc.bale.count[s] > 0 && !(budget_hours[s] > 0.0))
            throw InvariantError("expand_pattern: missing budget for moisture level '" +
                                 sc.levels.label(s) + "' with bales to process");
    }

    std::vector<int> total_periods(nlevels, 0);
    for (int s = 0; s < nlevels; ++s) {
        if (budget_hours[s] > 0.0)
            total_periods[s] = periods_for_budget(budget_hours[s], sc.period_minutes);
    }

    Schedule sched;
    sched.period_minutes = sc.period_minutes;

    if (pattern.kind == FeedingPattern::Kind::Blocked) {
        // Flatten repetitions, check bale-count consistency.
        std::vector<PatternBlock> flat;
        std::vector<long> bales_per_level(nlevels, 0);
        for (long r = 0; r < pattern.repetitions; ++r)
            for (const auto& b : pattern.blocks) flat.push_back(b);
        for (const auto& b : flat) {
            if (b.level < 0 || b.level >= nlevels)
                throw InvariantError("pattern block references an undefined moisture level");
            bales_per_level[b.level] += b.bales;
        }
        for (int s = 0; s < nlevels; ++s) {
            if (bales_per_level[s] != sc.bale.count[s])
                throw InvariantError(
                    "pattern: total bales for level '" + sc.levels.label(s) + "' (" +
                    std::to_string(bales_per_level[s]) + ") != scenario count (" +
                    std::to_string(sc.bale.count[s]) + ")");
        }

        // Per level: split its period total across its blocks by bale-mass
        // share (equal masses per bale make that the bale-count share).
        std::vector<std::vector<double>> weights(nlevels);
        std::vector<std::vector<size_t>> members(nlevels);
        for (size_t i = 0; i < flat.size(); ++i) {
            weights[flat[i].level].push_back(static_cast<double>(flat[i].bales));
            members[flat[i].level].push_back(i);
        }
        std::vector<int> block_periods(flat.size(), 0);
        for (int s = 0; s < nlevels; ++s) {
            auto counts = cumulative_split(total_periods[s], weights[s]);
            for (size_t j = 0; j < members[s].size(); ++j)
                block_periods[members[s][j]] = counts[j];
        }
        for (size_t i = 0; i < flat.size(); ++i)
            sched.level_of_period.insert(sched.level_of_period.end(), block_periods[i],
                                         flat[i].level);
        return sched;
    }

    // Random: one contiguous slot per bale, order by seeded uniform shuffle.
    std::vector<int> bales;
    for (int s = 0; s < nlevels; ++s)
        bales.insert(bales.end(), sc.bale.count[s], s);
    std::mt19937_64 rng(pattern.seed);
    for (size_t i = bales.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rng() % i);
        std::swap(bales[i - 1], bales[j]);
    }

    // Equal split of each level's periods across its bales, consumed in
    // shuffle order.
    std::vector<std::vector<int>> slot_sizes(nlevels);
    for (int s = 0; s < nlevels; ++s) {
        long n = sc.bale.count[s];
        if (n > 0)
            slot_sizes[s] = cumulative_split(total_periods[s],
                                             std::vector<double>(n, 1.0));
    }
    std::vector<size_t> next_slot(nlevels, 0);
    for (int lvl : bales) {
        int len = slot_sizes[lvl].at(next_slot[lvl]++);
        sched.level_of_period.insert(sched.level_of_period.end(), len, lvl);
    }
    return sched;
}

ExpansionCostTable derive_expansion_costs(const Scenario& sc) {
    ExpansionCostTable table;
    table.storage_index = sc.graph.storage_units();
    table.options = sc.econ.expansion_options;
    table.nlevels = sc.levels.size();
    table.values.reserve(table.storage_index.size() * table.nlevels * table.options.size());
    for (int su : table.storage_index) {
        const auto& e = sc.graph.equipment[su];
        for (int s = 0; s < table.nlevels; ++s) {
            for (double k : table.options)
                table.values.push_back(e.unit_cost[s] *
                                       std::pow(1.0 + k, sc.econ.scaling_exponent));
        }
    }
    return table;
}

double gamma(const Scenario& sc, const Schedule& schedule, int t) {
    if (t < 0 || t >= schedule.periods())
        throw InvariantError("gamma: period " + std::to_string(t) + " outside horizon");
    int s = schedule.level_at(t);
    return sc.bale.width_m * sc.bale.height_m * sc.bale.density.at(s);
}

}  // namespace feedflow
