#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pwa/bench.hpp"
#include "pwa/fit.hpp"
#include "pwa/mmps.hpp"
#include "pwa/modulus.hpp"

namespace pwa {

// One CLI invocation, fully specified. Everything that influences a number
// in the output lives here so the manifest can reproduce the bundle.
struct RunConfig {
    std::string command;    // fit | modulus | radius | verify | case-study
    std::string function;   // registered benchmark name or path to a 2-column CSV table
    std::string surrogate;  // mmps-v1 path; empty when the command does not need one
    int grid_resolution = 2001;  // per-axis sample counts for fitting / Delta / oracle grids
    int gamma_steps = 400;
    std::optional<double> target_chi;  // verify: radius to check the oracle against
    std::optional<double> delta;       // radius: residual bound to certify at
    int pieces = 3;                    // fit: max-affine pieces per segment
    int segment = 0;                   // modulus/radius/verify: which segment of the surrogate
    FitObjective objective = FitObjective::Linf;
    std::uint64_t seed = 0;
    std::string output_dir = "report";
};

struct ReportBundle {
    SensitivityReport sensitivity;  // headline report of the run, when the command makes one
    std::vector<ModulusCurve> curves;
    std::optional<MmpsFunction> surrogate;
    nlohmann::json manifest;
    // Relative path -> exact bytes written under output_dir, in write order.
    std::vector<std::pair<std::string, std::string>> files;
};

// Resolve --function: registered benchmark first, else a CSV file with a
// header row and exactly two columns (x, value) interpreted as a piecewise
// linear function on [min x, max x].
Benchmark load_function(const std::string& spec);

MmpsFunction load_surrogate(const std::string& path);

nlohmann::json manifest_json(const RunConfig& config);
RunConfig config_from_manifest(const nlohmann::json& manifest, const std::string& output_dir);

// Executes the configured pipeline and writes the bundle under
// config.output_dir. Analysis outcomes (verified=false, degenerate bounds)
// are data in the reports, not errors.
ReportBundle run(const RunConfig& config);

ReportBundle run_from_manifest(const std::string& manifest_path, const std::string& output_dir);

}  // namespace pwa
