#include "fdmix/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fdmix/errors.hpp"

namespace fdmix {

namespace {

enum class Kind { Number, Integer, Boolean, Word, NumberList, Grid, PowerPairs, WordList };

struct KeySpec {
    const char* key;
    Kind kind;
    const char* default_value;
};

// Sorted by key; canonical_dump relies on std::map ordering anyway.
const KeySpec kKeys[] = {
    {"benchmark.budget", Kind::Number, "0.03"},
    {"benchmark.grid", Kind::Grid, "-10:30:0.25"},
    {"benchmark.nus", Kind::NumberList, "1,1.25"},
    {"environment.bandwidth_hz", Kind::Number, "10000000"},
    {"environment.lambda_b", Kind::Number, "0.001"},
    {"environment.lambda_u", Kind::Number, "0.02"},
    {"environment.mu", Kind::Number, "1"},
    {"environment.noise_density_dbm_hz", Kind::Number, "-174"},
    {"environment.noise_figure_bs_db", Kind::Number, "8"},
    {"environment.noise_figure_ue_db", Kind::Number, "9"},
    {"environment.nu_dl", Kind::Number, "1"},
    {"environment.nu_ul", Kind::Number, "1.25"},
    {"links.bs_bs.loss_at_1km_db", Kind::Number, "140.7"},
    {"links.bs_bs.slope_db", Kind::Number, "36.7"},
    {"links.bs_ue.loss_at_1km_db", Kind::Number, "140.7"},
    {"links.bs_ue.slope_db", Kind::Number, "36.7"},
    {"links.ue_ue.loss_at_1km_db", Kind::Number, "140.7"},
    {"links.ue_ue.slope_db", Kind::Number, "36.7"},
    {"metrics.coverage_threshold_db", Kind::Number, "-8"},
    {"metrics.interference_limited", Kind::Boolean, "false"},
    {"metrics.thd_time_share", Kind::Number, "0.5"},
    {"mix.rho_d", Kind::Number, "0.25"},
    {"mix.rho_f", Kind::Number, "0.5"},
    {"mix.rho_u", Kind::Number, "0.25"},
    {"numerics.abs_tol", Kind::Number, "1e-12"},
    {"numerics.max_subdivisions", Kind::Integer, "1000"},
    {"numerics.rel_tol", Kind::Number, "1e-06"},
    {"numerics.tail_mass_cutoff", Kind::Number, "1e-09"},
    {"powers.eps", Kind::Number, "0"},
    {"powers.p_bs_dbm", Kind::Number, "24"},
    {"powers.p_ue_dbm", Kind::Number, "23"},
    {"powers.sic_db", Kind::Number, "110"},
    {"simulation.drops", Kind::Integer, "1000"},
    {"simulation.half_width", Kind::Number, "1000"},
    {"simulation.min_bs_per_drop", Kind::Integer, "1"},
    {"simulation.seed", Kind::Integer, "1"},
    {"simulation.tagging", Kind::Word, "central"},
    {"simulation.threads", Kind::Integer, "0"},
    {"sweep.engine", Kind::Word, "analytic"},
    {"sweep.even_hd_split", Kind::Boolean, "true"},
    {"sweep.metrics", Kind::WordList, "ase_dl,ase_ul,cov_dl,cov_ul"},
    {"sweep.power_pairs", Kind::PowerPairs, "24/23,24/10,10/23"},
    {"sweep.rho_f_grid", Kind::Grid, "0:1:0.05"},
    {"sweep.sic_db", Kind::NumberList, "70,85,100,110"},
    {"sweep.thd_rows", Kind::Boolean, "true"},
};

const KeySpec* find_key(const std::string& key) {
    for (const auto& k : kKeys)
        if (key == k.key) return &k;
    return nullptr;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_number(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "inf" || t == "+inf") return INFINITY;
    if (t == "-inf") return -INFINITY;
    double v = 0.0;
    const char* end = t.data() + t.size();
    const auto res = std::from_chars(t.data(), end, v);
    if (t.empty() || res.ec != std::errc() || res.ptr != end || std::isnan(v))
        throw ConfigError(key, "expected a number, got '" + text + "'");
    return v;
}

std::uint64_t parse_integer(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const char* end = t.data() + t.size();
    const auto res = std::from_chars(t.data(), end, v);
    if (t.empty() || res.ec != std::errc() || res.ptr != end)
        throw ConfigError(key, "expected a non-negative integer, got '" + text + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ConfigError(key, "expected true or false, got '" + text + "'");
}

// Returns the canonical spelling of a value, throwing on malformed input.
std::string normalise(const KeySpec& spec, const std::string& raw) {
    const std::string key = spec.key;
    const std::string v = trim(raw);
    switch (spec.kind) {
    case Kind::Number: return format_number(parse_number(key, v));
    case Kind::Integer: return std::to_string(parse_integer(key, v));
    case Kind::Boolean: return parse_bool(key, v) ? "true" : "false";
    case Kind::Word:
        if (v.empty() || v.find_first_of(" \t,") != std::string::npos)
            throw ConfigError(key, "expected a single word, got '" + raw + "'");
        return v;
    case Kind::WordList: {
        std::string out;
        for (const auto& w : split(v, ',')) {
            if (w.empty()) throw ConfigError(key, "empty item in list '" + raw + "'");
            out += (out.empty() ? "" : ",") + w;
        }
        if (out.empty()) throw ConfigError(key, "list is empty");
        return out;
    }
    case Kind::NumberList: {
        std::string out;
        for (const auto& w : split(v, ',')) {
            if (w.empty()) throw ConfigError(key, "empty item in list '" + raw + "'");
            out += (out.empty() ? "" : ",") + format_number(parse_number(key, w));
        }
        if (out.empty()) throw ConfigError(key, "list is empty");
        return out;
    }
    case Kind::Grid: {
        // "lo:hi:step" or an explicit comma list
        if (v.find(':') == std::string::npos) return normalise({spec.key, Kind::NumberList, ""}, v);
        const auto parts = split(v, ':');
        if (parts.size() != 3) throw ConfigError(key, "grid must look like lo:hi:step, got '" + raw + "'");
        const double step = parse_number(key, parts[2]);
        if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError(key, "grid step must be positive");
        return format_number(parse_number(key, parts[0])) + ":" +
               format_number(parse_number(key, parts[1])) + ":" + format_number(step);
    }
    case Kind::PowerPairs: {
        std::string out;
        for (const auto& w : split(v, ',')) {
            const auto pq = split(w, '/');
            if (pq.size() != 2)
                throw ConfigError(key, "power pairs look like p_bs_dbm/p_ue_dbm, got '" + w + "'");
            out += (out.empty() ? "" : ",") + format_number(parse_number(key, pq[0])) + "/" +
                   format_number(parse_number(key, pq[1]));
        }
        if (out.empty()) throw ConfigError(key, "list is empty");
        return out;
    }
    }
    return v;
}

std::vector<double> number_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& w : split(v, ',')) out.push_back(parse_number(key, w));
    return out;
}

std::vector<double> grid_values(const std::string& key, const std::string& v) {
    if (v.find(':') == std::string::npos) return number_list(key, v);
    const auto parts = split(v, ':');
    try {
        return threshold_grid(parse_number(key, parts[0]), parse_number(key, parts[1]),
                              parse_number(key, parts[2]));
    } catch (const InvalidParameter& e) {
        throw ConfigError(key, e.what());
    }
}

class Reader {
public:
    explicit Reader(const std::map<std::string, std::string>& e) : e_(e) {}

    const std::string& text(const std::string& key) const { return e_.at(key); }
    double num(const std::string& key) const { return parse_number(key, text(key)); }
    std::uint64_t integer(const std::string& key) const { return parse_integer(key, text(key)); }
    bool flag(const std::string& key) const { return parse_bool(key, text(key)); }

    double in_range(const std::string& key, double lo, double hi) const {
        const double v = num(key);
        if (!(v >= lo && v <= hi))
            throw ConfigError(key, "value " + text(key) + " outside [" + format_number(lo) + ", " +
                                       format_number(hi) + "]");
        return v;
    }
    double positive(const std::string& key) const {
        const double v = num(key);
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be positive and finite");
        return v;
    }
    double finite(const std::string& key) const {
        const double v = num(key);
        if (!std::isfinite(v)) throw ConfigError(key, "must be finite");
        return v;
    }

private:
    const std::map<std::string, std::string>& e_;
};

LinkClass read_link(const Reader& r, const std::string& name) {
    const std::string base = "links." + name + ".";
    const double loss = r.finite(base + "loss_at_1km_db");
    const double slope = r.num(base + "slope_db");
    if (!(slope > 20.0) || !std::isfinite(slope))
        throw ConfigError(base + "slope_db", "path-loss exponent must exceed 2 (slope > 20 dB/decade)");
    return LinkClass::from_km_formula(loss, slope);
}

void build(RunConfig& cfg) {
    const Reader r(cfg.entries);

    RadioEnvironment env;
    env.bs_density = r.positive("environment.lambda_b");
    env.ue_density = r.positive("environment.lambda_u");
    env.fading_rate = r.positive("environment.mu");
    env.bandwidth = r.positive("environment.bandwidth_hz");
    const double n0 = r.finite("environment.noise_density_dbm_hz");
    env.noise_dl = noise_power(n0, env.bandwidth, r.finite("environment.noise_figure_ue_db"));
    env.noise_ul = noise_power(n0, env.bandwidth, r.finite("environment.noise_figure_bs_db"));
    env.nu_dl = r.positive("environment.nu_dl");
    env.nu_ul = r.positive("environment.nu_ul");
    env.link_bs_ue = read_link(r, "bs_ue");
    env.link_ue_ue = read_link(r, "ue_ue");
    env.link_bs_bs = read_link(r, "bs_bs");

    Scenario scn;
    scn.env = env;
    scn.mix.rho_f = r.in_range("mix.rho_f", 0.0, 1.0);
    scn.mix.rho_d = r.in_range("mix.rho_d", 0.0, 1.0);
    scn.mix.rho_u = r.in_range("mix.rho_u", 0.0, 1.0);
    try {
        validate(scn.mix);
    } catch (const InvalidParameter& e) {
        throw ConfigError("mix", e.what());
    }
    scn.power.p_bs = dbm_to_watt(r.finite("powers.p_bs_dbm"));
    scn.power.p_ue = dbm_to_watt(r.finite("powers.p_ue_dbm"));
    scn.power.power_control_eps = r.in_range("powers.eps", 0.0, 1.0);
    scn.power.sic_db = r.num("powers.sic_db");
    if (scn.power.sic_db < 0.0) throw ConfigError("powers.sic_db", "must be non-negative");

    scn.quad.rel_tol = r.positive("numerics.rel_tol");
    scn.quad.abs_tol = r.in_range("numerics.abs_tol", 0.0, 1.0);
    scn.quad.max_subdivisions = r.integer("numerics.max_subdivisions");
    if (scn.quad.max_subdivisions < 1) throw ConfigError("numerics.max_subdivisions", "must be at least 1");
    scn.quad.tail_mass_cutoff = r.positive("numerics.tail_mass_cutoff");

    scn.interference_limited = r.flag("metrics.interference_limited");
    scn.coverage_threshold_db = r.finite("metrics.coverage_threshold_db");
    scn.thd_time_share = r.in_range("metrics.thd_time_share", 0.0, 1.0);

    SimWindow win;
    win.half_width = r.positive("simulation.half_width");
    win.num_drops = r.integer("simulation.drops");
    win.master_seed = r.integer("simulation.seed");
    win.min_bs_per_drop = r.integer("simulation.min_bs_per_drop");
    win.threads = static_cast<unsigned>(r.integer("simulation.threads"));
    const std::string& tag = r.text("simulation.tagging");
    if (tag == "central") win.tagging = TaggingRule::CentralCell;
    else if (tag == "uniform") win.tagging = TaggingRule::UniformCell;
    else throw ConfigError("simulation.tagging", "expected central or uniform, got '" + tag + "'");

    SweepPlan plan;
    plan.base = scn;
    plan.window = win;
    plan.rho_f_grid = grid_values("sweep.rho_f_grid", r.text("sweep.rho_f_grid"));
    for (double v : plan.rho_f_grid)
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("sweep.rho_f_grid", "values must lie in [0, 1]");
    plan.sic_db = number_list("sweep.sic_db", r.text("sweep.sic_db"));
    plan.power_pairs.clear();
    for (const auto& w : split(r.text("sweep.power_pairs"), ',')) {
        const auto pq = split(w, '/');
        plan.power_pairs.push_back({parse_number("sweep.power_pairs", pq[0]),
                                    parse_number("sweep.power_pairs", pq[1])});
    }
    try {
        plan.engine = parse_engine(r.text("sweep.engine"));
    } catch (const InvalidParameter& e) {
        throw ConfigError("sweep.engine", e.what());
    }
    plan.metrics.clear();
    for (const auto& w : split(r.text("sweep.metrics"), ',')) {
        try {
            plan.metrics.push_back(parse_metric(w));
        } catch (const InvalidParameter& e) {
            throw ConfigError("sweep.metrics", e.what());
        }
    }
    plan.thd_rows = r.flag("sweep.thd_rows");
    plan.even_hd_split = r.flag("sweep.even_hd_split");
    plan.threads = win.threads;

    BenchmarkOptions bench;
    bench.nus = number_list("benchmark.nus", r.text("benchmark.nus"));
    for (double nu : bench.nus)
        if (!(nu > 0.0) || !std::isfinite(nu)) throw ConfigError("benchmark.nus", "nu must be positive");
    const std::string& grid = r.text("benchmark.grid");
    if (grid.find(':') == std::string::npos)
        throw ConfigError("benchmark.grid", "expected lo:hi:step");
    const auto parts = split(grid, ':');
    bench.lo_db = parse_number("benchmark.grid", parts[0]);
    bench.hi_db = parse_number("benchmark.grid", parts[1]);
    bench.step_db = parse_number("benchmark.grid", parts[2]);
    if (!(bench.hi_db > bench.lo_db)) throw ConfigError("benchmark.grid", "hi must exceed lo");

    cfg.scenario = scn;
    cfg.window = win;
    cfg.sweep = plan;
    cfg.benchmark = bench;
    cfg.benchmark_budget = r.positive("benchmark.budget");
    cfg.sweep.scenario_hash = scenario_hash(cfg);
}

std::map<std::string, std::string> default_entries() {
    std::map<std::string, std::string> e;
    for (const auto& k : kKeys) e[k.key] = normalise(k, k.default_value);
    return e;
}

}  // namespace

RunConfig default_config() {
    RunConfig cfg;
    cfg.entries = default_entries();
    build(cfg);
    return cfg;
}

RunConfig parse_config(std::istream& in, const std::string& source) {
    RunConfig cfg;
    cfg.entries = default_entries();
    std::map<std::string, int> seen;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = source + ":" + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw ConfigError(line, where + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(line, where + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(line, where + ": missing key");
        if (!section.empty()) key = section + "." + key;
        const KeySpec* spec = find_key(key);
        if (!spec) throw ConfigError(key, where + ": unknown key");
        if (auto it = seen.find(key); it != seen.end())
            throw ConfigError(key, where + ": duplicate key (first set on line " +
                                       std::to_string(it->second) + ")");
        seen[key] = lineno;
        try {
            cfg.entries[key] = normalise(*spec, value);
        } catch (const ConfigError& e) {
            throw ConfigError(key, where + ": " + std::string(e.what()).substr(key.size() + 2));
        }
    }
    build(cfg);
    return cfg;
}

RunConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "<string>");
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    return parse_config(in, path);
}

void set_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    const KeySpec* spec = find_key(key);
    if (!spec) throw ConfigError(key, "unknown key");
    cfg.entries[key] = normalise(*spec, value);
    build(cfg);
}

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& k : kKeys) out.emplace_back(k.key);
    return out;
}

std::string canonical_dump(const RunConfig& cfg) {
    std::string out;
    for (const auto& [k, v] : cfg.entries) out += k + " = " + v + "\n";
    return out;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string scenario_hash(const RunConfig& cfg) {
    std::string text;
    for (const auto& [k, v] : cfg.entries)
        if (k != "simulation.threads") text += k + " = " + v + "\n";
    return fnv1a_hex(text);
}

}  // namespace fdmix
