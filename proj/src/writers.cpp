#include "hybridmem/writers.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "hybridmem/errors.hpp"
#include "hybridmem/version.hpp"

namespace hybridmem::cli {

std::string format_double(double value)
{
    if (!std::isfinite(value)) {
        throw NumericalError("refusing to serialize a non-finite value");
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                   std::chars_format::scientific);
    return std::string(buf, res.ptr);
}

void atomic_write_text(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.parent_path()
        / (target.filename().string() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open for writing: " + tmp.string());
        }
        out << content;
        out.flush();
        if (!out) {
            throw IoError("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place: " + target.string());
    }
}

std::string manifest_reference(const std::string& scenario, const std::string& hash)
{
    return "# manifest=manifest.json scenario=" + scenario + " config=" + hash
         + " tool=hybridmem/" + std::string(kVersion);
}

std::string render_csv(const std::vector<std::string>& columns,
                       const std::vector<std::vector<double>>& rows,
                       const std::string& manifest_ref)
{
    std::ostringstream out;
    out << manifest_ref << "\n";
    for (std::size_t c = 0; c < columns.size(); ++c) {
        out << (c ? "," : "") << columns[c];
    }
    out << "\n";
    for (const std::vector<double>& row : rows) {
        if (row.size() != columns.size()) {
            throw NumericalError("record width does not match the header");
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << (c ? "," : "") << format_double(row[c]);
        }
        out << "\n";
    }
    return out.str();
}

std::string render_json_columns(const std::vector<std::string>& columns,
                                const std::vector<std::vector<double>>& rows,
                                const std::string& manifest_ref)
{
    Json doc;
    doc["manifest_ref"] = manifest_ref;
    Json cols = Json::object();
    for (std::size_t c = 0; c < columns.size(); ++c) {
        Json arr = Json::array();
        for (const std::vector<double>& row : rows) {
            if (row.size() != columns.size()) {
                throw NumericalError("record width does not match the header");
            }
            if (!std::isfinite(row[c])) {
                throw NumericalError("refusing to serialize a non-finite value");
            }
            arr.push_back(row[c]);
        }
        cols[columns[c]] = std::move(arr);
    }
    doc["columns"] = std::move(cols);
    return doc.dump(2) + "\n";
}

void trajectory_rows(const dynamics::Trajectory& traj,
                     std::vector<std::string>& columns,
                     std::vector<std::vector<double>>& rows)
{
    const bool has_fidelity = !traj.fidelity.empty();
    const bool has_pop_m = !traj.pop_m.empty();
    columns = {"t"};
    if (has_fidelity) {
        columns.push_back("fidelity");
    }
    columns.push_back("pop_C");
    if (has_pop_m) {
        columns.push_back("pop_M");
    }
    columns.push_back("pop_NVE");
    columns.push_back(traj.is_density() ? "trace" : "norm");

    rows.clear();
    rows.reserve(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        std::vector<double> row;
        row.push_back(traj.times[k]);
        if (has_fidelity) {
            row.push_back(traj.fidelity[k]);
        }
        row.push_back(traj.pop_c[k]);
        if (has_pop_m) {
            row.push_back(traj.pop_m[k]);
        }
        row.push_back(traj.pop_nve[k]);
        row.push_back(traj.norm_or_trace[k]);
        rows.push_back(std::move(row));
    }
}

void sweep_rows(const experiments::SweepResult& result,
                std::vector<std::string>& columns,
                std::vector<std::vector<double>>& rows)
{
    columns.clear();
    for (const experiments::SweepAxis& axis : result.axes) {
        columns.push_back(axis.path);
    }
    columns.push_back("fidelity");

    rows.clear();
    const std::size_t n1 = result.rows();
    const std::size_t n2 = result.cols();
    rows.reserve(n1 * n2);
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            std::vector<double> row;
            row.push_back(result.axes[0].values[i]);
            if (result.axes.size() == 2) {
                row.push_back(result.axes[1].values[j]);
            }
            row.push_back(result.grid[i * n2 + j]);
            rows.push_back(std::move(row));
        }
    }
}

std::string write_records(const std::string& out_dir, const std::string& base,
                          const std::vector<std::string>& columns,
                          const std::vector<std::vector<double>>& rows,
                          OutputFormat format, const std::string& manifest_ref)
{
    namespace fs = std::filesystem;
    const std::string name = base + (format == OutputFormat::Csv ? ".csv" : ".json");
    const std::string content = format == OutputFormat::Csv
                                    ? render_csv(columns, rows, manifest_ref)
                                    : render_json_columns(columns, rows, manifest_ref);
    atomic_write_text((fs::path(out_dir) / name).string(), content);
    return name;
}

} // namespace hybridmem::cli
