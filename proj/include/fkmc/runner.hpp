// Command dispatch: builds the field and experiment from a RunConfig, runs
// it, writes the CSV (and optional SVG rendered from the CSV), and applies
// any acceptance thresholds from the config.

#pragma once

#include <string>

#include "fkmc/config.hpp"
#include "fkmc/verify.hpp"

namespace fkmc {

struct RunResult {
    int exit_code = 0;            // 0 iff run succeeded and thresholds held
    std::string csv_path;
    std::string svg_path;         // empty unless requested
    std::string summary;          // one-line outcome
    ReportTable table;
    bool thresholds_checked = false;
    bool thresholds_met = true;
};

// Executes the configured command. Filesystem side effects: the CSV, the
// optional SVG, and appended diagnostics in <out_dir>/run.log.
RunResult run(const RunConfig& config);

// In-memory variant used by tests: computes the table and threshold verdict
// without touching the filesystem.
RunResult run_table_only(const RunConfig& config);

} // namespace fkmc
