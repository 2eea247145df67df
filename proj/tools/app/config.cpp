#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace capdrop::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a number, got '" + v + "'");
    }
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long long x = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected an integer, got '" + v + "'");
    }
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    if (out.empty()) throw ConfigError(key, "empty list");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key, "expected true or false, got '" + v + "'");
}

const std::map<std::string, std::vector<std::string>>& known_keys() {
    static const std::map<std::string, std::vector<std::string>> k{
        {"params", {"g", "sigma", "gamma_jump", "volume", "theta1", "theta2", "kappa"}},
        {"grid", {"n"}},
        {"run",
         {"eps_schedule", "solver", "seed", "t_end", "dt0", "snapshots", "perturb", "shift", "subspace",
          "eigen_count", "eigvec_csv", "xi56_constants", "lower_bound_samples"}},
    };
    return k;
}

}  // namespace

std::vector<PerturbTerm> parse_perturbation(const std::string& spec) {
    std::vector<PerturbTerm> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("perturb", "term '" + item + "' lacks ':amplitude'");
        const std::string mode = trim(item.substr(0, colon));
        PerturbTerm t;
        t.amp = to_double("perturb", trim(item.substr(colon + 1)));
        if (mode == "rand") {
            t.kind = "rand";
        } else if (mode.rfind("cos", 0) == 0 || mode.rfind("sin", 0) == 0) {
            t.kind = mode.substr(0, 3);
            t.k = static_cast<int>(to_int("perturb", mode.substr(3)));
            if (t.k < 0) throw ConfigError("perturb", "negative wavenumber");
        } else {
            throw ConfigError("perturb", "unknown mode '" + mode + "'");
        }
        out.push_back(t);
    }
    return out;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::map<std::string, bool> seen;
    std::string section;
    std::stringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("", "malformed section header on line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            if (!known_keys().count(section)) throw ConfigError(section, "unknown section");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("", "expected key=value on line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError(key, "key outside of any section");
        const auto& allowed = known_keys().at(section);
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError(key, "unknown key in [" + section + "]");
        if (seen[key]) throw ConfigError(key, "duplicate key");
        seen[key] = true;

        auto& p = cfg.params;
        if (key == "g") p.g = to_double(key, val);
        else if (key == "sigma") p.sigma = to_double(key, val);
        else if (key == "gamma_jump") p.gamma_jump = to_double(key, val);
        else if (key == "volume") p.volume = to_double(key, val);
        else if (key == "theta1") p.theta1 = to_double(key, val);
        else if (key == "theta2") p.theta2 = to_double(key, val);
        else if (key == "kappa") p.kappa = to_double(key, val);
        else if (key == "n") cfg.grid_n = static_cast<int>(to_int(key, val));
        else if (key == "eps_schedule") cfg.eps_schedule = to_list(key, val);
        else if (key == "solver") cfg.solver = val;
        else if (key == "seed") {
            const long long s = to_int(key, val);
            if (s < 0) throw ConfigError(key, "seed must be nonnegative");
            cfg.seed = static_cast<std::uint64_t>(s);
        }
        else if (key == "t_end") cfg.t_end = to_double(key, val);
        else if (key == "dt0") cfg.dt0 = to_double(key, val);
        else if (key == "snapshots") cfg.snapshots = static_cast<int>(to_int(key, val));
        else if (key == "perturb") cfg.perturb = parse_perturbation(val);
        else if (key == "shift") cfg.shift = to_double(key, val);
        else if (key == "subspace") cfg.subspace = val;
        else if (key == "eigen_count") cfg.eigen_count = static_cast<int>(to_int(key, val));
        else if (key == "eigvec_csv") cfg.eigvec_csv = to_bool(key, val);
        else if (key == "xi56_constants") {
            const auto v = to_list(key, val);
            if (v.size() != 4) throw ConfigError(key, "expected C1,C2,D1,D2");
            std::copy(v.begin(), v.end(), cfg.xi56.begin());
        }
        else if (key == "lower_bound_samples") cfg.lower_bound_samples = static_cast<int>(to_int(key, val));
    }
    for (const char* req : {"g", "sigma", "gamma_jump", "volume"})
        if (!seen[req]) throw ConfigError(req, "missing required key");

    const auto& p = cfg.params;
    if (!(p.sigma > 0.0)) throw ConfigError("sigma", "must be positive");
    if (!(p.volume > 0.0)) throw ConfigError("volume", "must be positive");
    if (!(p.g >= 0.0)) throw ConfigError("g", "must be nonnegative");
    if (!(std::abs(p.gamma_jump) < p.sigma))
        throw ConfigError("gamma_jump", "Young relation violated: |gamma_jump| must be < sigma");
    if (!(p.kappa > 0.0)) throw ConfigError("kappa", "must be positive");
    const double half = 1.5707963267948966;
    if (!(p.theta1 >= 0.0 && p.theta1 < half)) throw ConfigError("theta1", "must lie in [0, pi/2)");
    if (!(p.theta2 >= 0.0 && p.theta2 < half)) throw ConfigError("theta2", "must lie in [0, pi/2)");
    if (cfg.grid_n < 8) throw ConfigError("n", "need at least 8 cells");
    for (std::size_t i = 0; i < cfg.eps_schedule.size(); ++i) {
        if (!(cfg.eps_schedule[i] > 0.0)) throw ConfigError("eps_schedule", "entries must be positive");
        if (i > 0 && !(cfg.eps_schedule[i] < cfg.eps_schedule[i - 1]))
            throw ConfigError("eps_schedule", "must be strictly decreasing");
    }
    if (cfg.solver != "minimize" && cfg.solver != "shoot") throw ConfigError("solver", "expected minimize or shoot");
    if (!(cfg.t_end > 0.0)) throw ConfigError("t_end", "must be positive");
    if (!(cfg.dt0 > 0.0)) throw ConfigError("dt0", "must be positive");
    if (cfg.snapshots < 4) throw ConfigError("snapshots", "need at least 4");
    if (cfg.eigen_count < 1) throw ConfigError("eigen_count", "must be at least 1");
    if (cfg.lower_bound_samples < 1) throw ConfigError("lower_bound_samples", "must be at least 1");
    const std::vector<std::string> subs{"doubly-constrained", "mass-constrained", "unconstrained", "doubly", "mass",
                                        "none"};
    if (std::find(subs.begin(), subs.end(), cfg.subspace) == subs.end())
        throw ConfigError("subspace", "unknown subspace '" + cfg.subspace + "'");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("", "cannot read config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

}  // namespace capdrop::cli
