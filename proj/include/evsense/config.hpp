#pragma once

// Scenario files: a small TOML subset (tables, arrays of tables, scalar
// key/value pairs). Infinite thresholds are written `inf`.

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <locale>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "evsense/presets.hpp"

namespace evsense {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string format_double(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, end);
    // Keep floats recognizable as floats.
    if (s.find_first_of(".eE") == std::string::npos)
        s += ".0";
    return s;
}

using Scalar = std::variant<double, std::int64_t, bool, std::string>;

struct Table {
    std::map<std::string, Scalar> values;
    std::map<std::string, int> lines;
};

struct Document {
    std::map<std::string, Table> tables;
    std::map<std::string, std::vector<Table>> arrays;
};

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline Scalar parse_scalar(std::string_view v, int line)
{
    const auto fail = [&]() -> Scalar {
        throw ConfigError("line " + std::to_string(line) + ": cannot parse value '" + std::string(v) + "'");
    };
    if (v.empty())
        return fail();
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"')
            return fail();
        return std::string(v.substr(1, v.size() - 2));
    }
    if (v == "true") return true;
    if (v == "false") return false;
    if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
    if (v == "-inf") return -std::numeric_limits<double>::infinity();

    std::string cleaned;
    for (char c : v)
        if (c != '_')
            cleaned += c;
    const char* first = cleaned.data();
    const char* last = first + cleaned.size();
    if (*first == '+')
        ++first;
    if (cleaned.find_first_of(".eE") == std::string::npos) {
        std::int64_t i = 0;
        auto [p, ec] = std::from_chars(first, last, i);
        if (ec == std::errc() && p == last)
            return i;
        return fail();
    }
    double d = 0.0;
    auto [p, ec] = std::from_chars(first, last, d);
    if (ec == std::errc() && p == last)
        return d;
    return fail();
}

inline Document parse_document(std::string_view text)
{
    Document doc;
    Table* current = &doc.tables[""];
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        bool in_str = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"')
                in_str = !in_str;
            else if (line[i] == '#' && !in_str) {
                line = line.substr(0, i);
                break;
            }
        }
        line = trim(line);
        if (line.empty())
            continue;

        if (line.starts_with("[[")) {
            if (!line.ends_with("]]"))
                throw ConfigError("line " + std::to_string(line_no) + ": malformed array-of-tables header");
            auto& arr = doc.arrays[std::string(trim(line.substr(2, line.size() - 4)))];
            arr.emplace_back();
            current = &arr.back();
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": malformed table header");
            const std::string name(trim(line.substr(1, line.size() - 2)));
            if (doc.tables.contains(name))
                throw ConfigError("line " + std::to_string(line_no) + ": duplicate table [" + name + "]");
            current = &doc.tables[name];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        if (current->values.contains(key))
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        current->values[key] = parse_scalar(trim(line.substr(eq + 1)), line_no);
        current->lines[key] = line_no;
    }
    return doc;
}

/// Reads typed keys out of a table and rejects keys nobody asked for.
class TableReader {
public:
    TableReader(const Table& t, std::string name) : t_(t), name_(std::move(name)) {}

    void get(const char* key, double& out)
    {
        if (auto* v = find(key)) {
            if (auto* d = std::get_if<double>(v)) out = *d;
            else if (auto* i = std::get_if<std::int64_t>(v)) out = static_cast<double>(*i);
            else type_error(key, "a number");
        }
    }

    template <typename Int>
        requires std::is_integral_v<Int>
    void get(const char* key, Int& out)
    {
        if (auto* v = find(key)) {
            auto* i = std::get_if<std::int64_t>(v);
            if (!i) type_error(key, "an integer");
            if (*i < static_cast<std::int64_t>(std::numeric_limits<Int>::min()) ||
                static_cast<std::uint64_t>(*i) > static_cast<std::uint64_t>(std::numeric_limits<Int>::max()))
                throw ConfigError(where(key) + " is out of range");
            out = static_cast<Int>(*i);
        }
    }

    void get(const char* key, bool& out)
    {
        if (auto* v = find(key)) {
            auto* b = std::get_if<bool>(v);
            if (!b) type_error(key, "true or false");
            out = *b;
        }
    }

    void get(const char* key, std::string& out)
    {
        if (auto* v = find(key)) {
            auto* s = std::get_if<std::string>(v);
            if (!s) type_error(key, "a string");
            out = *s;
        }
    }

    void finish() const
    {
        for (const auto& [k, v] : t_.values)
            if (!used_.contains(k))
                throw ConfigError("unknown key '" + k + "' in [" + name_ + "]");
    }

private:
    const Scalar* find(const char* key)
    {
        auto it = t_.values.find(key);
        if (it == t_.values.end())
            return nullptr;
        used_[key] = true;
        return &it->second;
    }

    std::string where(const char* key) const
    {
        auto it = t_.lines.find(key);
        return "line " + std::to_string(it == t_.lines.end() ? 0 : it->second) + ": '" + key + "'";
    }

    [[noreturn]] void type_error(const char* key, const char* what) const
    {
        throw ConfigError(where(key) + " must be " + what);
    }

    const Table& t_;
    std::string name_;
    std::map<std::string, bool> used_;
};

} // namespace detail

/// Serializes an experiment. parse_config(write_config(x)) == x.
inline std::string write_config(const Experiment& ex)
{
    using detail::format_double;
    const auto& sc = ex.scenario;
    const auto& p = ex.params;
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << "# evsense scenario\n\n";
    os << "[scenario]\n";
    os << "width = " << format_double(sc.region.width) << "\n";
    os << "height = " << format_double(sc.region.height) << "\n";
    os << "total_events = " << sc.total_events << "\n";
    os << "max_t = " << sc.max_t << "\n";
    os << "vis_time = " << sc.vis_time << "\n\n";

    os << "[agents]\n";
    os << "behavior = \"" << to_string(p.behavior) << "\"\n";
    os << "n_agents = " << p.n_agents << "\n";
    os << "still_time = " << p.still_time << "\n";
    os << "step_size = " << format_double(p.step_size) << "\n";
    os << "time_window = " << p.time_window << "\n";
    os << "sensing_range = " << format_double(p.sensing.r_s) << "\n";
    os << "comm_range = " << format_double(p.sensing.r_c) << "\n";
    os << "cell_size = " << format_double(p.cell_size) << "\n";
    os << "metric_window = " << p.metric_window << "\n";
    os << "boundary = \"" << to_string(p.boundary) << "\"\n";
    os << "phase_offsets = " << (p.phase_offsets ? "true" : "false") << "\n\n";

    os << "[switching]\n";
    os << "rtog_min_grad = " << format_double(p.switching.r_to_g_min_grad) << "\n";
    os << "gtor_max_grad = " << format_double(p.switching.g_to_r_max_grad) << "\n";
    os << "gtor_prob = " << format_double(p.switching.g_to_r_prob) << "\n";
    os << "gtor_first_steps = " << p.switching.g_to_r_first_steps << "\n";

    for (const auto& patch : sc.patches) {
        os << "\n[[patch]]\n";
        os << "x0 = " << format_double(patch.rect_at_start.x0) << "\n";
        os << "y0 = " << format_double(patch.rect_at_start.y0) << "\n";
        os << "x1 = " << format_double(patch.rect_at_start.x1) << "\n";
        os << "y1 = " << format_double(patch.rect_at_start.y1) << "\n";
        os << "vx = " << format_double(patch.vx) << "\n";
        os << "vy = " << format_double(patch.vy) << "\n";
        os << "t_start = " << patch.t_start << "\n";
        os << "t_end = " << patch.t_end << "\n";
        os << "weight = " << format_double(patch.weight) << "\n";
    }
    return os.str();
}

inline Experiment parse_config(std::string_view text)
{
    const detail::Document doc = detail::parse_document(text);
    for (const auto& [name, table] : doc.tables)
        if (name != "" && name != "scenario" && name != "agents" && name != "switching")
            throw ConfigError("unknown table [" + name + "]");
    if (!doc.tables.at("").values.empty())
        throw ConfigError("keys must appear inside a table");
    for (const auto& [name, arr] : doc.arrays)
        if (name != "patch")
            throw ConfigError("unknown array of tables [[" + name + "]]");

    static const detail::Table empty;
    const auto table = [&](const char* n) -> const detail::Table& {
        auto it = doc.tables.find(n);
        return it == doc.tables.end() ? empty : it->second;
    };

    Experiment ex;
    auto& sc = ex.scenario;
    auto& p = ex.params;
    {
        detail::TableReader r(table("scenario"), "scenario");
        double w = sc.region.width, h = sc.region.height;
        r.get("width", w);
        r.get("height", h);
        r.get("total_events", sc.total_events);
        r.get("max_t", sc.max_t);
        r.get("vis_time", sc.vis_time);
        r.finish();
        try {
            sc.region = Region(w, h);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    {
        detail::TableReader r(table("agents"), "agents");
        std::string behavior(to_string(p.behavior)), boundary(to_string(p.boundary));
        r.get("behavior", behavior);
        r.get("n_agents", p.n_agents);
        r.get("still_time", p.still_time);
        r.get("step_size", p.step_size);
        r.get("time_window", p.time_window);
        r.get("sensing_range", p.sensing.r_s);
        r.get("comm_range", p.sensing.r_c);
        r.get("cell_size", p.cell_size);
        r.get("metric_window", p.metric_window);
        r.get("boundary", boundary);
        r.get("phase_offsets", p.phase_offsets);
        r.finish();
        try {
            p.behavior = parse_behavior(behavior);
            p.boundary = parse_boundary(boundary);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    {
        detail::TableReader r(table("switching"), "switching");
        r.get("rtog_min_grad", p.switching.r_to_g_min_grad);
        r.get("gtor_max_grad", p.switching.g_to_r_max_grad);
        r.get("gtor_prob", p.switching.g_to_r_prob);
        r.get("gtor_first_steps", p.switching.g_to_r_first_steps);
        r.finish();
    }
    if (auto it = doc.arrays.find("patch"); it != doc.arrays.end()) {
        for (const auto& t : it->second) {
            detail::TableReader r(t, "patch");
            Patch patch;
            r.get("x0", patch.rect_at_start.x0);
            r.get("y0", patch.rect_at_start.y0);
            r.get("x1", patch.rect_at_start.x1);
            r.get("y1", patch.rect_at_start.y1);
            r.get("vx", patch.vx);
            r.get("vy", patch.vy);
            r.get("t_start", patch.t_start);
            r.get("t_end", patch.t_end);
            r.get("weight", patch.weight);
            r.finish();
            sc.patches.push_back(patch);
        }
    }
    try {
        sc.validate();
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return ex;
}

inline Experiment load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace evsense
