// Plain-text run configuration: '[section]' headers and 'key = value' lines,
// '#' comments. Unknown sections or keys are rejected with line numbers, as
// are missing required keys, so a config cannot silently drift.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fkmc/errors.hpp"

namespace fkmc {

struct RunConfig {
    // [run]
    std::string command;
    std::uint64_t seed = 0;
    int threads = 0; // 0 = hardware concurrency
    std::string out_dir = "out";
    bool svg = false;

    // [field]
    std::string field = "zero";
    int dim = 0;
    double amplitude = 1.0;
    double radius = 1.0;
    double b_field = 1.0;
    int electrons = 1;
    std::vector<std::vector<double>> nuclei;
    std::vector<double> charges;
    std::optional<double> clamp;

    // [mc]
    std::int64_t n_paths = 0;
    double dt = 0.0;
    std::vector<double> t_values;
    std::vector<double> dt_ladder;
    std::optional<double> beta;
    std::optional<double> q;
    double c0 = 1.0;
    double clamp_warn_rate = 1e-3;
    bool compare_variance = false;
    double variance_delta_max = 0.2;

    // [pairs]
    std::vector<std::vector<double>> bases;
    std::vector<double> axis;
    std::vector<double> deltas;

    // [points]
    std::vector<std::vector<double>> points;
    std::string psi = "one";
    double psi_sigma = 1.0;
    int psi_axis = 0;
    double psi_offset = 0.0;
    double energy = 0.0;

    // [kato]
    double alpha = 0.0;
    std::vector<double> t_ladder;
    double lattice_extent = 0.0;
    int lattice_per_axis = 0;

    // [accept] - optional thresholds; exit status reflects them
    std::map<std::string, double> accept;

    // Effective Hölder data: beta takes precedence, q = 1/(1-beta).
    double effective_beta() const;
    double effective_q() const;
};

// Parses the text of a config file. Throws ConfigError with a line-numbered
// message on any malformed, unknown, or inconsistent entry.
RunConfig parse_config(const std::string& text);

RunConfig parse_config_file(const std::string& path);

} // namespace fkmc
