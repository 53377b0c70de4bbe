#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hybridmem/errors.hpp"
#include "hybridmem/scenarios.hpp"
#include "hybridmem/version.hpp"

namespace {

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const hybridmem::ConfigError*>(&e)) {
        return 2;
    }
    if (dynamic_cast<const hybridmem::NumericalError*>(&e)) {
        return 3;
    }
    if (dynamic_cast<const hybridmem::IoError*>(&e)) {
        return 4;
    }
    return 1;
}

const char* kind_for(int code)
{
    switch (code) {
        case 2: return "config";
        case 3: return "numerical";
        case 4: return "io";
        default: return "internal";
    }
}

} // namespace

int main(int argc, char** argv)
{
    using namespace hybridmem;

    CLI::App app{"hybrid flux-qubit / spin-ensemble storage simulator"};
    app.set_version_flag("--version", std::string("hybridmem ") + kVersion);

    std::string scenario;
    app.add_option("scenario", scenario, "one of fig2..fig8 or custom-sweep")
        ->required()
        ->check(CLI::IsMember(std::vector<std::string>(
            std::begin(cli::kScenarioNames), std::end(cli::kScenarioNames))));

    std::string config_path;
    app.add_option("--config", config_path, "path to the JSON config")->required();
    std::string out_dir = "out";
    app.add_option("--out", out_dir, "output directory");
    std::string format = "csv";
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    std::string convention = "phase-corrected";
    app.add_option("--convention", convention, "storage-target phase convention")
        ->check(CLI::IsMember({"paper-literal", "phase-corrected"}));
    int workers = 1;
    app.add_option("--workers", workers, "parallel sweep cells")
        ->envname("HYBRIDMEM_WORKERS")
        ->check(CLI::PositiveNumber);
    std::vector<std::string> overrides;
    app.add_option("--set", overrides, "dotted.path=value config overrides");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help / --version
        }
        std::cerr << "error: kind=config message=" << e.what() << "\n";
        return 2;
    }

    try {
        cli::ParsedConfig parsed = cli::load_config_file(config_path);
        if (!overrides.empty()) {
            for (const std::string& assignment : overrides) {
                cli::apply_override(parsed.doc, assignment);
            }
            parsed = cli::reparse(parsed.doc);
        }

        cli::ScenarioOptions opts;
        opts.format = format == "csv" ? cli::OutputFormat::Csv : cli::OutputFormat::JsonColumns;
        opts.run.convention = convention == "phase-corrected"
                                  ? experiments::TargetConvention::PhaseCorrected
                                  : experiments::TargetConvention::Literal;
        opts.run.workers = workers;
        opts.config_path = config_path;

        const cli::RunManifest manifest = cli::run_scenario(scenario, parsed, out_dir, opts);
        std::cout << "wrote " << manifest.outputs.size() << " file(s) to " << out_dir
                  << " in " << manifest.duration_seconds << " s";
        for (const std::string& f : manifest.outputs) {
            std::cout << " " << f;
        }
        std::cout << "\n";
        return 0;
    } catch (const std::exception& e) {
        const int code = exit_code_for(e);
        std::cerr << "error: kind=" << kind_for(code) << " message=" << e.what() << "\n";
        return code;
    }
}
