#include "fkmc/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace fkmc {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& v, int line) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        fail(line, "expected a number, got '" + v + "'");
    }
    if (used != v.size()) fail(line, "expected a number, got '" + v + "'");
    return out;
}

std::int64_t parse_int(const std::string& v, int line) {
    std::size_t used = 0;
    std::int64_t out = 0;
    try {
        out = std::stoll(v, &used);
    } catch (const std::exception&) {
        fail(line, "expected an integer, got '" + v + "'");
    }
    if (used != v.size()) fail(line, "expected an integer, got '" + v + "'");
    return out;
}

std::uint64_t parse_uint(const std::string& v, int line) {
    std::size_t used = 0;
    std::uint64_t out = 0;
    try {
        out = std::stoull(v, &used);
    } catch (const std::exception&) {
        fail(line, "expected a non-negative integer, got '" + v + "'");
    }
    if (used != v.size() || v.find('-') != std::string::npos)
        fail(line, "expected a non-negative integer, got '" + v + "'");
    return out;
}

bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(line, "expected a boolean, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& v, int line) {
    std::vector<double> out;
    std::istringstream in(v);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) fail(line, "empty entry in list");
        out.push_back(parse_double(tok, line));
    }
    if (out.empty()) fail(line, "empty list");
    return out;
}

// Semicolon-separated points of comma-separated coordinates.
std::vector<std::vector<double>> parse_point_list(const std::string& v, int line) {
    std::vector<std::vector<double>> out;
    std::istringstream in(v);
    std::string tok;
    while (std::getline(in, tok, ';')) {
        tok = trim(tok);
        if (tok.empty()) fail(line, "empty point in list");
        out.push_back(parse_list(tok, line));
    }
    if (out.empty()) fail(line, "empty point list");
    for (const auto& p : out)
        if (p.size() != out.front().size()) fail(line, "points have mixed dimensions");
    return out;
}

const std::set<std::string> kCommands = {
    "coupling_bound", "smoothing",   "smoothing_exact", "residual_ladder",
    "kato_probe",     "heat_check",  "eigen_check"};

} // namespace

double RunConfig::effective_beta() const {
    if (beta) {
        if (!(*beta > 0.0) || !(*beta < 1.0)) throw ConfigError("beta must lie in (0,1)");
        return *beta;
    }
    if (q) {
        if (!(*q > 1.0)) throw ConfigError("q must exceed 1");
        return 1.0 - 1.0 / *q;
    }
    return 0.5;
}

double RunConfig::effective_q() const { return 1.0 / (1.0 - effective_beta()); }

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    std::string section;
    std::set<std::string> seen;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            static const std::set<std::string> kSections = {"run",    "field", "mc",
                                                            "pairs",  "points", "kato",
                                                            "accept"};
            if (!kSections.count(section)) fail(line_no, "unknown section [" + section + "]");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(line_no, "empty key");
        if (value.empty()) fail(line_no, "empty value for '" + key + "'");
        if (section.empty()) fail(line_no, "key '" + key + "' outside any section");
        const std::string qualified = section + "." + key;
        if (!seen.insert(qualified).second) fail(line_no, "duplicate key '" + qualified + "'");

        if (section == "run") {
            if (key == "command") {
                if (!kCommands.count(value)) fail(line_no, "unknown command '" + value + "'");
                cfg.command = value;
            } else if (key == "seed") {
                cfg.seed = parse_uint(value, line_no);
            } else if (key == "threads") {
                cfg.threads = static_cast<int>(parse_int(value, line_no));
                if (cfg.threads < 0) fail(line_no, "threads must be >= 0");
            } else if (key == "out_dir") {
                cfg.out_dir = value;
            } else if (key == "svg") {
                cfg.svg = parse_bool(value, line_no);
            } else {
                fail(line_no, "unknown key '" + qualified + "'");
            }
        } else if (section == "field") {
            if (key == "field") {
                static const std::set<std::string> kFields = {
                    "zero", "smooth_bump", "constant_field", "landau", "coulomb"};
                if (!kFields.count(value)) fail(line_no, "unknown field '" + value + "'");
                cfg.field = value;
            } else if (key == "dim") {
                cfg.dim = static_cast<int>(parse_int(value, line_no));
                if (cfg.dim < 1) fail(line_no, "dim must be >= 1");
            } else if (key == "amplitude") {
                cfg.amplitude = parse_double(value, line_no);
            } else if (key == "radius") {
                cfg.radius = parse_double(value, line_no);
            } else if (key == "b_field") {
                cfg.b_field = parse_double(value, line_no);
            } else if (key == "electrons") {
                cfg.electrons = static_cast<int>(parse_int(value, line_no));
            } else if (key == "nuclei") {
                cfg.nuclei = parse_point_list(value, line_no);
            } else if (key == "charges") {
                cfg.charges = parse_list(value, line_no);
            } else if (key == "clamp") {
                cfg.clamp = parse_double(value, line_no);
                if (!(*cfg.clamp > 0.0)) fail(line_no, "clamp must be positive");
            } else {
                fail(line_no, "unknown key '" + qualified + "'");
            }
        } else if (section == "mc") {
            if (key == "n_paths") {
                cfg.n_paths = parse_int(value, line_no);
                if (cfg.n_paths < 1) fail(line_no, "n_paths must be >= 1");
            } else if (key == "dt") {
                cfg.dt = parse_double(value, line_no);
                if (!(cfg.dt > 0.0)) fail(line_no, "dt must be positive");
            } else if (key == "t_values") {
                cfg.t_values = parse_list(value, line_no);
            } else if (key == "dt_ladder") {
                cfg.dt_ladder = parse_list(value, line_no);
            } else if (key == "beta") {
                const double b = parse_double(value, line_no);
                if (!(b > 0.0) || !(b < 1.0)) fail(line_no, "beta must lie in (0,1)");
                cfg.beta = b;
            } else if (key == "q") {
                const double qq = parse_double(value, line_no);
                if (!(qq > 1.0)) fail(line_no, "q must exceed 1");
                cfg.q = qq;
            } else if (key == "c0") {
                cfg.c0 = parse_double(value, line_no);
                if (!(cfg.c0 > 0.0)) fail(line_no, "c0 must be positive");
            } else if (key == "clamp_warn_rate") {
                cfg.clamp_warn_rate = parse_double(value, line_no);
            } else if (key == "compare_variance") {
                cfg.compare_variance = parse_bool(value, line_no);
            } else if (key == "variance_delta_max") {
                cfg.variance_delta_max = parse_double(value, line_no);
            } else {
                fail(line_no, "unknown key '" + qualified + "'");
            }
        } else if (section == "pairs") {
            if (key == "bases") {
                cfg.bases = parse_point_list(value, line_no);
            } else if (key == "axis") {
                cfg.axis = parse_list(value, line_no);
            } else if (key == "deltas") {
                cfg.deltas = parse_list(value, line_no);
            } else {
                fail(line_no, "unknown key '" + qualified + "'");
            }
        } else if (section == "points") {
            if (key == "points") {
                cfg.points = parse_point_list(value, line_no);
            } else if (key == "psi") {
                static const std::set<std::string> kPsi = {"one", "gaussian", "half_space",
                                                           "landau_ground"};
                if (!kPsi.count(value)) fail(line_no, "unknown psi '" + value + "'");
                cfg.psi = value;
            } else if (key == "psi_sigma") {
                cfg.psi_sigma = parse_double(value, line_no);
                if (!(cfg.psi_sigma > 0.0)) fail(line_no, "psi_sigma must be positive");
            } else if (key == "psi_axis") {
                cfg.psi_axis = static_cast<int>(parse_int(value, line_no));
                if (cfg.psi_axis < 0) fail(line_no, "psi_axis must be >= 0");
            } else if (key == "psi_offset") {
                cfg.psi_offset = parse_double(value, line_no);
            } else if (key == "energy") {
                cfg.energy = parse_double(value, line_no);
            } else {
                fail(line_no, "unknown key '" + qualified + "'");
            }
        } else if (section == "kato") {
            if (key == "alpha") {
                cfg.alpha = parse_double(value, line_no);
                if (cfg.alpha < 0.0 || cfg.alpha >= 2.0)
                    fail(line_no, "alpha must lie in [0, 2)");
            } else if (key == "t_ladder") {
                cfg.t_ladder = parse_list(value, line_no);
            } else if (key == "lattice_extent") {
                cfg.lattice_extent = parse_double(value, line_no);
                if (!(cfg.lattice_extent > 0.0)) fail(line_no, "lattice_extent must be positive");
            } else if (key == "lattice_per_axis") {
                cfg.lattice_per_axis = static_cast<int>(parse_int(value, line_no));
                if (cfg.lattice_per_axis < 2) fail(line_no, "lattice_per_axis must be >= 2");
            } else {
                fail(line_no, "unknown key '" + qualified + "'");
            }
        } else { // accept
            cfg.accept[key] = parse_double(value, line_no);
        }
    }
    if (cfg.command.empty()) throw ConfigError("config: missing [run] command");
    if (cfg.beta && cfg.q)
        throw ConfigError("config: give beta or q, not both");
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

} // namespace fkmc
