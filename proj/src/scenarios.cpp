#include "hybridmem/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>

#include "hybridmem/errors.hpp"
#include "hybridmem/version.hpp"

namespace hybridmem::cli {

namespace {

namespace fs = std::filesystem;
using experiments::Reduction;
using experiments::RunOptions;
using experiments::SweepAxis;
using experiments::SweepSpec;

std::vector<double> linspace(double lo, double hi, int n)
{
    if (n < 1) {
        throw ConfigError("scenario grid needs at least one point");
    }
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k) {
        out[k] = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
    }
    return out;
}

Json scenario_block(const ParsedConfig& parsed, const char* name,
                    std::initializer_list<const char*> allowed)
{
    if (!parsed.doc.contains("scenario") || !parsed.doc["scenario"].contains(name)) {
        return Json::object();
    }
    const Json& block = parsed.doc["scenario"][name];
    if (!block.is_object()) {
        throw ConfigError(std::string("config: scenario.") + name + ": expected an object");
    }
    for (const auto& item : block.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError(std::string("config: scenario.") + name + "." + item.key()
                              + ": unknown key");
        }
    }
    return block;
}

double block_number(const Json& block, const char* scenario, const char* key,
                    double fallback)
{
    if (!block.contains(key)) {
        return fallback;
    }
    if (!block[key].is_number()) {
        throw ConfigError(std::string("config: scenario.") + scenario + "." + key
                          + ": expected a number");
    }
    return block[key].get<double>();
}

std::string block_string(const Json& block, const char* scenario, const char* key,
                         const std::string& fallback)
{
    if (!block.contains(key)) {
        return fallback;
    }
    if (!block[key].is_string()) {
        throw ConfigError(std::string("config: scenario.") + scenario + "." + key
                          + ": expected a string");
    }
    return block[key].get<std::string>();
}

std::vector<double> block_numbers(const Json& block, const char* scenario,
                                  const char* key, std::vector<double> fallback)
{
    if (!block.contains(key)) {
        return fallback;
    }
    if (!block[key].is_array()) {
        throw ConfigError(std::string("config: scenario.") + scenario + "." + key
                          + ": expected an array of numbers");
    }
    std::vector<double> out;
    for (const Json& v : block[key]) {
        if (!v.is_number()) {
            throw ConfigError(std::string("config: scenario.") + scenario + "." + key
                              + ": expected an array of numbers");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

Reduction parse_reduction(const std::string& text, const char* scenario)
{
    if (text == "at-nominal-transfer-time") {
        return Reduction::AtNominalTransferTime;
    }
    if (text == "max-over-time") {
        return Reduction::MaxOverTime;
    }
    throw ConfigError(std::string("config: scenario.") + scenario
                      + ".reduction: expected 'at-nominal-transfer-time' or 'max-over-time'");
}

// Builds the two-axis spec shared by fig4 and fig6.
SweepSpec heatmap_spec(const Json& block, const char* scenario, const UnitScale& scale,
                       double delta_lo, double delta_hi, int n_delta,
                       const std::string& default_axes, Reduction default_reduction)
{
    SweepSpec spec;
    spec.scenario = "unused";
    spec.reduction = parse_reduction(
        block_string(block, scenario, "reduction",
                     default_reduction == Reduction::MaxOverTime
                         ? "max-over-time"
                         : "at-nominal-transfer-time"),
        scenario);
    const std::string axes = block_string(block, scenario, "axes", default_axes);
    const double lo = block_number(block, scenario, "delta_min", delta_lo);
    const double hi = block_number(block, scenario, "delta_max", delta_hi);
    const int nd = static_cast<int>(block_number(block, scenario, "n_delta", n_delta));
    std::vector<double> deltas = linspace(lo * scale.frequency, hi * scale.frequency, nd);
    if (axes == "detunings") {
        spec.axes = {SweepAxis{"delta_c", deltas}, SweepAxis{"delta_nv", deltas}};
    } else if (axes == "delta-mismatch") {
        const double llo = block_number(block, scenario, "lambda_min", -0.5);
        const double lhi = block_number(block, scenario, "lambda_max", 0.5);
        const int nl = static_cast<int>(block_number(block, scenario, "n_lambda", 21));
        spec.axes = {SweepAxis{"delta", deltas}, SweepAxis{"lambda", linspace(llo, lhi, nl)}};
    } else {
        throw ConfigError(std::string("config: scenario.") + scenario
                          + ".axes: expected 'detunings' or 'delta-mismatch'");
    }
    return spec;
}

struct OutputCollector {
    std::string out_dir;
    OutputFormat format;
    std::string manifest_ref;
    std::vector<std::string> written;

    void add_trajectory(const std::string& base, const dynamics::Trajectory& traj)
    {
        std::vector<std::string> columns;
        std::vector<std::vector<double>> rows;
        trajectory_rows(traj, columns, rows);
        written.push_back(write_records(out_dir, base, columns, rows, format, manifest_ref));
    }

    void add_sweep(const std::string& base, const experiments::SweepResult& result)
    {
        std::vector<std::string> columns;
        std::vector<std::vector<double>> rows;
        sweep_rows(result, columns, rows);
        written.push_back(write_records(out_dir, base, columns, rows, format, manifest_ref));
    }

    void add_table(const std::string& base, const std::vector<std::string>& columns,
                   const std::vector<std::vector<double>>& rows)
    {
        written.push_back(write_records(out_dir, base, columns, rows, format, manifest_ref));
    }
};

void decoherence_table(const experiments::DecoherenceStudy& study, bool dispersive,
                       std::vector<std::string>& columns,
                       std::vector<std::vector<double>>& rows)
{
    columns = {"t", "gamma", "fidelity", "pop_C", "pop_M", "pop_NVE", "trace"};
    rows.clear();
    const auto& trajs = dispersive ? study.dispersive : study.resonant;
    for (std::size_t j = 0; j < study.gammas.size(); ++j) {
        const dynamics::Trajectory& traj = trajs[j];
        for (std::size_t k = 0; k < traj.size(); ++k) {
            rows.push_back({traj.times[k], study.gammas[j], traj.fidelity[k],
                            traj.pop_c[k], traj.pop_m[k], traj.pop_nve[k],
                            traj.norm_or_trace[k]});
        }
    }
}

} // namespace

Json manifest_to_json(const RunManifest& m)
{
    Json j;
    j["scenario"] = m.scenario;
    j["config_path"] = m.config_path;
    j["config_hash"] = m.config_hash;
    j["tool_version"] = m.tool_version;
    j["convention"] = m.convention;
    j["workers"] = m.workers;
    j["outputs"] = m.outputs;
    j["duration_seconds"] = m.duration_seconds;
    return j;
}

bool is_scenario_name(const std::string& name)
{
    for (const char* known : kScenarioNames) {
        if (name == known) {
            return true;
        }
    }
    return false;
}

RunManifest run_scenario(const std::string& name, const ParsedConfig& parsed,
                         const std::string& out_dir, const ScenarioOptions& opts)
{
    if (!is_scenario_name(name)) {
        throw ConfigError("unknown scenario: " + name);
    }
    const auto started = std::chrono::steady_clock::now();

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) {
        throw IoError("cannot create output directory: " + out_dir);
    }

    const model::SystemConfig& cfg = parsed.config;
    const UnitScale scale = unit_scale(cfg.unit);
    const RunOptions& run = opts.run;
    const std::string hash = config_hash(parsed.source_text);

    OutputCollector out{out_dir, opts.format, manifest_reference(name, hash), {}};

    if (name == "fig2") {
        const Json block = scenario_block(parsed, "fig2", {"n_points"});
        const int n = static_cast<int>(block_number(block, "fig2", "n_points", 2001));
        out.add_trajectory("trajectory", experiments::run_resonant_storage(cfg, run, n));
    } else if (name == "fig3") {
        const Json block = scenario_block(parsed, "fig3", {"taus", "delta_maxes"});
        std::vector<double> taus = block_numbers(block, "fig3", "taus", linspace(0.0, 3.0, 31));
        std::vector<double> dmax =
            block_numbers(block, "fig3", "delta_maxes", {5.0, 10.0, 20.0, 40.0});
        for (double& t : taus) {
            t *= scale.time;
        }
        for (double& d : dmax) {
            d *= scale.frequency;
        }
        out.add_sweep("heatmap", experiments::run_ramp_sweep(cfg, taus, dmax, run));
    } else if (name == "fig4") {
        const Json block = scenario_block(
            parsed, "fig4",
            {"axes", "delta_min", "delta_max", "n_delta", "lambda_min", "lambda_max",
             "n_lambda", "reduction"});
        const SweepSpec spec = heatmap_spec(block, "fig4", scale, -2.0, 2.0, 41,
                                            "detunings", Reduction::AtNominalTransferTime);
        out.add_sweep("heatmap", experiments::run_detuning_heatmap(cfg, spec, run));
    } else if (name == "fig5") {
        const Json block = scenario_block(parsed, "fig5", {"n_points"});
        const int n = static_cast<int>(block_number(block, "fig5", "n_points", 6001));
        const experiments::DispersiveComparison cmp =
            experiments::run_dispersive_compare(cfg, run, n);
        if (cmp.regime_warning) {
            std::cerr << "warning: detunings below 5*max(g, J_t); the coupler-eliminated"
                         " picture degrades there\n";
        }
        out.add_trajectory("trajectory_full", cmp.full);
        out.add_trajectory("trajectory_effective", cmp.effective);
    } else if (name == "fig6") {
        const Json block = scenario_block(
            parsed, "fig6",
            {"axes", "delta_min", "delta_max", "n_delta", "lambda_min", "lambda_max",
             "n_lambda", "reduction"});
        const SweepSpec spec = heatmap_spec(block, "fig6", scale, 5.0, 15.0, 21,
                                            "delta-mismatch", Reduction::MaxOverTime);
        out.add_sweep("heatmap", experiments::run_dispersive_heatmap(cfg, spec, run));
    } else if (name == "fig7") {
        const Json block = scenario_block(
            parsed, "fig7",
            {"d_n_values", "theta_over_pi", "mode", "delta", "timeseries_d_n"});
        std::vector<double> d_values = block_numbers(
            block, "fig7", "d_n_values",
            {2e-6, 4e-6, 6e-6, 8e-6, 10e-6, 12e-6, 14e-6, 16e-6, 18e-6, 20e-6});
        const double theta =
            block_number(block, "fig7", "theta_over_pi", 0.25) * std::numbers::pi;
        const std::string mode_text = block_string(block, "fig7", "mode", "resonant");
        experiments::ProtocolMode mode;
        if (mode_text == "resonant") {
            mode = experiments::ProtocolMode::Resonant;
        } else if (mode_text == "dispersive") {
            mode = experiments::ProtocolMode::Dispersive;
        } else {
            throw ConfigError("config: scenario.fig7.mode: expected 'resonant' or 'dispersive'");
        }
        const double delta =
            block_number(block, "fig7", "delta", 350.0) * scale.frequency;
        const double d_series = block_number(block, "fig7", "timeseries_d_n", 8e-6);
        const experiments::SeparationStudy study = experiments::run_separation_study(
            cfg, d_values, theta, mode, delta, run, d_series);

        std::vector<std::vector<double>> rows;
        for (std::size_t k = 0; k < study.d_n_values.size(); ++k) {
            rows.push_back({study.d_n_values[k], study.fidelity_proposed[k],
                            study.fidelity_single[k]});
        }
        out.add_table("distance_scan", {"d_n", "fidelity_proposed", "fidelity_single"},
                      rows);
        out.add_trajectory("trajectory_proposed", study.proposed_series);
        out.add_trajectory("trajectory_single", study.single_series);
    } else if (name == "fig8") {
        const Json block = scenario_block(parsed, "fig8", {"gammas", "delta"});
        std::vector<double> gammas =
            block_numbers(block, "fig8", "gammas", {0.0, 0.2, 1.0});
        for (double& g : gammas) {
            g *= scale.frequency;
        }
        const double delta =
            block_number(block, "fig8", "delta", 350.0) * scale.frequency;
        const experiments::DecoherenceStudy study =
            experiments::run_decoherence_study(cfg, gammas, delta, run);
        std::vector<std::string> columns;
        std::vector<std::vector<double>> rows;
        decoherence_table(study, false, columns, rows);
        out.add_table("decoherence_resonant", columns, rows);
        decoherence_table(study, true, columns, rows);
        out.add_table("decoherence_dispersive", columns, rows);
    } else {  // custom-sweep
        const Json block = scenario_block(parsed, "sweep", {"scenario", "reduction", "axes"});
        if (!block.contains("axes")) {
            throw ConfigError("config: scenario.sweep.axes: missing required field");
        }
        SweepSpec spec;
        spec.scenario = block_string(block, "sweep", "scenario", "resonant");
        spec.reduction = parse_reduction(
            block_string(block, "sweep", "reduction", "max-over-time"), "sweep");
        if (!block["axes"].is_array()) {
            throw ConfigError("config: scenario.sweep.axes: expected an array");
        }
        for (const Json& axis : block["axes"]) {
            if (!axis.is_object() || !axis.contains("path") || !axis.contains("values")) {
                throw ConfigError("config: scenario.sweep.axes: each axis needs path and values");
            }
            SweepAxis a;
            a.path = axis["path"].get<std::string>();
            for (const Json& v : axis["values"]) {
                if (!v.is_number()) {
                    throw ConfigError("config: scenario.sweep.axes: values must be numbers");
                }
                a.values.push_back(v.get<double>());
            }
            // Frequency-like paths are given in config units.
            if (a.path != "nve.n_spins" && a.path != "nve.fock_cutoff"
                && a.path.rfind("drive.", 0) != 0) {
                for (double& v : a.values) {
                    v *= scale.frequency;
                }
            }
            spec.axes.push_back(std::move(a));
        }
        out.add_sweep("heatmap", experiments::sweep(cfg, spec, run));
    }

    RunManifest manifest;
    manifest.scenario = name;
    manifest.config_path = opts.config_path;
    manifest.config_hash = hash;
    manifest.tool_version = kVersion;
    manifest.convention = run.convention == experiments::TargetConvention::PhaseCorrected
                              ? "phase-corrected"
                              : "paper-literal";
    manifest.workers = run.workers;
    manifest.outputs = out.written;
    manifest.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    atomic_write_text((fs::path(out_dir) / "manifest.json").string(),
                      manifest_to_json(manifest).dump(2) + "\n");
    return manifest;
}

} // namespace hybridmem::cli
