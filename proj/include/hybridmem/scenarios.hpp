#pragma once

#include <string>
#include <vector>

#include "hybridmem/config_io.hpp"
#include "hybridmem/experiments.hpp"
#include "hybridmem/writers.hpp"

namespace hybridmem::cli {

struct RunManifest {
    std::string scenario;
    std::string config_path;
    std::string config_hash;
    std::string tool_version;
    std::string convention;
    int workers = 1;
    std::vector<std::string> outputs;
    double duration_seconds = 0.0;
};

Json manifest_to_json(const RunManifest& m);

struct ScenarioOptions {
    OutputFormat format = OutputFormat::Csv;
    experiments::RunOptions run;
    std::string config_path;  // recorded in the manifest
};

inline constexpr const char* kScenarioNames[] = {
    "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "custom-sweep",
};

bool is_scenario_name(const std::string& name);

// Dispatches a named scenario, writes its data files plus manifest.json into
// out_dir (atomically, data files deterministic for a fixed config hash).
RunManifest run_scenario(const std::string& name, const ParsedConfig& parsed,
                         const std::string& out_dir, const ScenarioOptions& opts);

} // namespace hybridmem::cli
