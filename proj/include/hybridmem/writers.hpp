#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hybridmem/dynamics.hpp"
#include "hybridmem/experiments.hpp"

namespace hybridmem::cli {

using Json = nlohmann::json;

enum class OutputFormat { Csv, JsonColumns };

// Shortest round-trip decimal representation; throws NumericalError on
// non-finite values (they are never serialized).
std::string format_double(double value);

// Temp file + rename in the target directory.
void atomic_write_text(const std::string& path, const std::string& content);

// First line of every data file, tying it back to its manifest. Contains no
// volatile fields so reruns stay byte-identical.
std::string manifest_reference(const std::string& scenario, const std::string& hash);

std::string render_csv(const std::vector<std::string>& columns,
                       const std::vector<std::vector<double>>& rows,
                       const std::string& manifest_ref);
std::string render_json_columns(const std::vector<std::string>& columns,
                                const std::vector<std::vector<double>>& rows,
                                const std::string& manifest_ref);

// Trajectory -> columns (t, fidelity?, populations..., norm or trace).
void trajectory_rows(const dynamics::Trajectory& traj,
                     std::vector<std::string>& columns,
                     std::vector<std::vector<double>>& rows);

// SweepResult -> long-format rows (axis values then fidelity).
void sweep_rows(const experiments::SweepResult& result,
                std::vector<std::string>& columns,
                std::vector<std::vector<double>>& rows);

// Renders per format and writes atomically; returns the file name written
// (base + ".csv"/".json").
std::string write_records(const std::string& out_dir, const std::string& base,
                          const std::vector<std::string>& columns,
                          const std::vector<std::vector<double>>& rows,
                          OutputFormat format, const std::string& manifest_ref);

} // namespace hybridmem::cli
