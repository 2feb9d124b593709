#include "stoc/bench/plan.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace stoc::bench {

const char* to_string(Method m) { return m == Method::space_time ? "space-time" : "semi-discrete"; }

Method parse_method(const std::string& s) {
    if (s == "space-time" || s == "st") return Method::space_time;
    if (s == "semi-discrete" || s == "sd") return Method::semi_discrete;
    throw std::invalid_argument("unknown method '" + s + "'");
}

std::size_t RunSpec::n_h() const {
    std::size_t n = 1;
    for (std::size_t d = 0; d < spec.dim; ++d) n *= n_cells + 1;
    return n;
}

std::string RunSpec::id() const {
    return spec.name + "/" + to_string(method) + "/" + std::to_string(n_h()) + "/" + std::to_string(K);
}

ConfigError::ConfigError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& s, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(line, "expected a number, got '" + s + "'");
    }
}

std::size_t to_count(const std::string& s, std::size_t line) {
    std::size_t v = 0;
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) throw ConfigError(line, "expected a non-negative integer, got '" + s + "'");
    return v;
}

using KeyValues = std::map<std::string, std::pair<std::string, std::size_t>>;

const std::vector<std::string> kKnownKeys = {
    "case", "epsilon", "n_cells", "n_h", "K", "pairing", "method", "tau_rel", "tau_abs", "tau_stagnation", "s0",
    "backtrack_factor", "armijo_c", "max_iters", "max_backtracks", "adjoint_sampling"};

void expand(const KeyValues& kv, std::size_t section_line, SweepPlan& plan) {
    auto get = [&](const std::string& key) -> const std::pair<std::string, std::size_t>* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    auto require = [&](const std::string& key) -> const std::pair<std::string, std::size_t>& {
        if (const auto* v = get(key)) return *v;
        throw ConfigError(section_line, "run block is missing '" + key + "'");
    };

    const auto& case_kv = require("case");
    double epsilon = 1e-3;
    if (const auto* e = get("epsilon")) epsilon = to_double(e->first, e->second);
    CaseSpec spec;
    try {
        spec = find_case(case_kv.first, epsilon);
    } catch (const UnknownCase& ex) {
        throw ConfigError(case_kv.second, ex.what());
    }

    std::vector<std::size_t> cells;
    if (const auto* c = get("n_cells")) {
        for (const auto& s : split_list(c->first)) cells.push_back(to_count(s, c->second));
    } else if (const auto* n = get("n_h")) {
        // n_h given per axis: nodes = cells + 1
        for (const auto& s : split_list(n->first)) {
            const auto v = to_count(s, n->second);
            if (v < 2) throw ConfigError(n->second, "n_h must be at least 2");
            cells.push_back(v - 1);
        }
    } else {
        throw ConfigError(section_line, "run block needs 'n_cells' or 'n_h'");
    }
    const auto& k_kv = require("K");
    std::vector<std::size_t> ks;
    for (const auto& s : split_list(k_kv.first)) ks.push_back(to_count(s, k_kv.second));
    for (auto c : cells)
        if (c == 0) throw ConfigError(section_line, "n_cells must be positive");
    for (auto k : ks)
        if (k == 0) throw ConfigError(k_kv.second, "K must be positive");

    std::string pairing = "product";
    if (const auto* p = get("pairing")) {
        pairing = p->first;
        if (pairing != "product" && pairing != "zip") throw ConfigError(p->second, "pairing must be 'product' or 'zip'");
        if (pairing == "zip" && cells.size() != ks.size())
            throw ConfigError(p->second, "zip pairing needs equally long n_cells and K lists");
    }

    std::vector<Method> methods;
    if (const auto* m = get("method")) {
        if (m->first == "both") {
            methods = {Method::space_time, Method::semi_discrete};
        } else {
            try {
                methods = {parse_method(m->first)};
            } catch (const std::invalid_argument& ex) {
                throw ConfigError(m->second, ex.what());
            }
        }
    } else {
        methods = {Method::space_time, Method::semi_discrete};
    }

    PgmConfig<double> cfg;
    auto set_real = [&](const char* key, double& field) {
        if (const auto* v = get(key)) field = to_double(v->first, v->second);
    };
    auto set_count = [&](const char* key, std::size_t& field) {
        if (const auto* v = get(key)) field = to_count(v->first, v->second);
    };
    set_real("tau_rel", cfg.tau_rel);
    set_real("tau_abs", cfg.tau_abs);
    set_real("tau_stagnation", cfg.tau_stagnation);
    set_real("s0", cfg.s0);
    set_real("backtrack_factor", cfg.backtrack_factor);
    set_real("armijo_c", cfg.armijo_c);
    set_count("max_iters", cfg.max_iters);
    set_count("max_backtracks", cfg.max_backtracks);
    try {
        cfg.validate();
    } catch (const std::invalid_argument& ex) {
        const auto* at = get("tau_rel") ? get("tau_rel") : nullptr;
        throw ConfigError(at ? at->second : section_line, ex.what());
    }

    AdjointSampling sampling = AdjointSampling::right_endpoint;
    if (const auto* a = get("adjoint_sampling")) {
        if (a->first == "right-endpoint") sampling = AdjointSampling::right_endpoint;
        else if (a->first == "interval-average") sampling = AdjointSampling::interval_average;
        else throw ConfigError(a->second, "adjoint_sampling must be 'right-endpoint' or 'interval-average'");
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (pairing == "zip") {
        for (std::size_t i = 0; i < cells.size(); ++i) pairs.emplace_back(cells[i], ks[i]);
    } else {
        for (auto c : cells)
            for (auto k : ks) pairs.emplace_back(c, k);
    }
    for (const auto& [c, k] : pairs)
        for (auto m : methods) plan.push_back({spec, c, k, m, cfg, sampling});
}

}  // namespace

SweepPlan parse_config(std::istream& in, std::vector<std::string>* warnings) {
    SweepPlan plan;
    KeyValues defaults;
    KeyValues current;
    bool in_run = false;
    std::size_t section_line = 0;
    std::size_t line_no = 0;
    bool any_content = false;

    auto close_section = [&] {
        if (in_run) expand(current, section_line, plan);
        in_run = false;
    };

    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find_first_of("#;");
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        any_content = true;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line_no, "malformed section header '" + line + "'");
            const std::string name = trim(line.substr(1, line.size() - 2));
            close_section();
            if (name == "run") {
                in_run = true;
                current = defaults;
                section_line = line_no;
            } else if (name != "defaults") {
                throw ConfigError(line_no, "unknown section '" + name + "'");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ConfigError(line_no, "expected 'key = value'");
        if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end())
            throw ConfigError(line_no, "unknown key '" + key + "'");
        (in_run ? current : defaults)[key] = {value, line_no};
    }
    close_section();

    if (warnings && !any_content) warnings->push_back("configuration is empty; nothing to run");
    else if (warnings && plan.empty()) warnings->push_back("configuration has no [run] blocks; nothing to run");
    return plan;
}

SweepPlan load_config(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open configuration '" + path.string() + "'");
    return parse_config(in, warnings);
}

SweepPlan table2_plan() {
    std::istringstream cfg(
        "[run]\n"
        "case = case1\n"
        "n_cells = 10, 25, 50, 100\n"
        "K = 40, 100, 200, 400\n"
        "pairing = zip\n"
        "method = both\n");
    return parse_config(cfg);
}

SweepPlan table3_plan() {
    std::istringstream cfg(
        "[defaults]\n"
        "case = case2\n"
        "epsilon = 1e-3\n"
        "method = both\n"
        "[run]\n"
        "n_cells = 128\n"
        "K = 9, 1025\n"
        "[run]\n"
        "n_cells = 1024\n"
        "K = 5, 1025\n");
    return parse_config(cfg);
}

RunSpec parse_run_id(const std::string& id) {
    std::vector<std::string> parts;
    std::stringstream ss(id);
    std::string item;
    while (std::getline(ss, item, '/')) parts.push_back(item);
    if (parts.size() != 4) throw std::invalid_argument("run id must look like <case>/<method>/<n_h>/<K>");
    RunSpec r;
    r.spec = find_case(parts[0]);
    r.method = parse_method(parts[1]);
    const auto n_h = to_count(parts[2], 0);
    r.K = to_count(parts[3], 0);
    // n_h is the total node count; recover the per-axis cell count.
    const auto per_axis = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(n_h), 1.0 / static_cast<double>(r.spec.dim))));
    std::size_t total = 1;
    for (std::size_t d = 0; d < r.spec.dim; ++d) total *= per_axis;
    if (per_axis < 2 || total != n_h || r.K == 0) throw std::invalid_argument("run id has an invalid n_h or K: " + id);
    r.n_cells = per_axis - 1;
    return r;
}

}  // namespace stoc::bench
