#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rim/experiments.hpp"

namespace rim {

enum class Subcommand { solve, shape_study, mc_probability, invariance, k_diagnostics, validate };

std::string subcommand_name(Subcommand s);

struct RunManifest {
    Subcommand subcommand = Subcommand::solve;
    std::string config_path;
    std::string output_dir;  // empty => $RIM_OUTPUT_ROOT (or ./runs) / <subcommand>
    std::optional<std::uint64_t> seed_override;
    bool deterministic = false;  // forces the sigma = 0 branch
    bool force = false;          // allow overwriting a completed run
};

// Strict INI-style config: [section] headers mirror the module names, unknown
// sections or keys are errors. Throws ValidationError with the offending line.
StudyConfig parse_config_text(const std::string& text);
StudyConfig parse_config_file(const std::string& path);

// Round-trippable echo of the full config including defaults.
std::string config_echo(const StudyConfig& config);

struct ValidationReport {
    std::vector<std::string> violations;
    bool clean() const { return violations.empty(); }
};

// Checks every study precondition that can be decided from the config alone:
// spectral splitting, dealiasing headroom, the beta window, the noise-intensity
// ceiling sigma < min{(lambda_s-(p-1)lambda_u)/p, -lambda_u}, SC < 1 for the
// resolved truncation radius, chart acceptance of the requested radii, and
// grid alignment of the time steps.
ValidationReport validate_config(const StudyConfig& config);

}  // namespace rim
