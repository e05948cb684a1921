#pragma once

#include "macrodim/config.hpp"
#include "macrodim/spectrum_lab.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace macrodim {

enum ExitCode { exit_ok = 0, exit_failure = 1, exit_validation = 2, exit_resource = 3,
                exit_integrity = 4 };

struct RunRequest {
    std::string subcommand;  // simulate | dimension | spectrum | oracle | fixtures | report
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;
    std::vector<std::string> inputs;  // report: run directories
};

// Config file plus overrides, unknown keys rejected.
ExperimentConfig build_config(const RunRequest& req);
SpectrumConfig spectrum_config(const ExperimentConfig& c);

// Applies MACRODIM_WORKERS; returns the worker count in effect.
int configure_workers();

// Runs one subcommand and maps failures onto exit codes.
int run(const RunRequest& req, std::ostream& out, std::ostream& err);

// Reads a spectrum run directory after checking its digests.
std::vector<SpectrumResult> read_spectrum_run(const std::filesystem::path& dir);
Report emit_report(const std::vector<std::filesystem::path>& runs,
                   const std::filesystem::path& out_dir);

}  // namespace macrodim
