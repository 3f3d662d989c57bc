#pragma once

#include <string>

#include "config.hpp"

namespace hvar {

struct RunOptions {
    std::string out_dir = ".";
    int threads = 1;
    bool quiet = false;
};

struct RunOutcome {
    bool verification_pass = true;
    std::string report_path;
};

/// Execute the configured pipeline and write its CSV/JSON outputs.
/// Throws UsageError / SolverError / IoError; a clean run with a failed
/// verification (e.g. a violated Lewy-Stampacchia bound) returns
/// verification_pass = false.
RunOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options);

/// Run the identity suites (group axioms, commutators, kernel admissibility,
/// duality, form properties) on the configured grid/kernel.
RunOutcome run_verify(const ExperimentConfig& config, const RunOptions& options);

/// Write the grid CSV; returns the output path.
std::string export_grid(const ExperimentConfig& config, const RunOptions& options);

}  // namespace hvar
