#pragma once

#include <string>

#include <json.hpp>

#include "hybridmem/model.hpp"

namespace hybridmem::cli {

using Json = nlohmann::json;

// Parsed document plus the validated system it describes. The raw document
// is kept because scenario blocks and --set overrides operate on it.
struct ParsedConfig {
    Json doc;
    model::SystemConfig config;
    std::string source_text;  // bytes that were parsed, hashed into manifests
};

// Strict parse: unknown keys anywhere in the document are rejected with
// their path. Frequencies are interpreted per unit.mode (units of gamma in
// dimensionless-gamma mode, MHz in si-angular mode); times likewise
// (1/gamma resp. ns).
ParsedConfig parse_config(const std::string& text);

ParsedConfig load_config_file(const std::string& path);

// Applies one "dotted.path=value" override to the document (value parsed as
// JSON when possible, kept as string otherwise) and re-validates.
void apply_override(Json& doc, const std::string& assignment);

// Rebuilds ParsedConfig from an already-overridden document.
ParsedConfig reparse(const Json& doc);

// 64-bit FNV-1a over the raw bytes, formatted "fnv1a64:<hex>".
std::string config_hash(const std::string& text);

// Conversion factors from config units to internal units.
struct UnitScale {
    double frequency = 1.0;  // config frequency -> internal angular frequency
    double time = 1.0;       // config time -> internal time
};

UnitScale unit_scale(const model::UnitSystem& unit);

} // namespace hybridmem::cli
