#include "hybridmem/config_io.hpp"

#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hybridmem/errors.hpp"

namespace hybridmem::cli {

namespace {

constexpr double kMhzToAngular = 2.0 * std::numbers::pi * 1e6;
constexpr double kNsToSeconds = 1e-9;

[[noreturn]] void fail(const std::string& path, const std::string& what)
{
    throw ConfigError("config: " + path + ": " + what);
}

void require_object(const Json& j, const std::string& path)
{
    if (!j.is_object()) {
        fail(path, "expected an object");
    }
}

void check_keys(const Json& j, const std::string& path,
                std::initializer_list<const char*> allowed)
{
    require_object(j, path);
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            fail(path + "." + item.key(), "unknown key");
        }
    }
}

double get_number(const Json& j, const std::string& path, const char* key)
{
    if (!j.contains(key)) {
        fail(path + "." + key, "missing required field");
    }
    if (!j[key].is_number()) {
        fail(path + "." + key, "expected a number");
    }
    return j[key].get<double>();
}

double get_number_or(const Json& j, const std::string& path, const char* key,
                     double fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    if (!j[key].is_number()) {
        fail(path + "." + key, "expected a number");
    }
    return j[key].get<double>();
}

std::string get_string(const Json& j, const std::string& path, const char* key)
{
    if (!j.contains(key)) {
        fail(path + "." + key, "missing required field");
    }
    if (!j[key].is_string()) {
        fail(path + "." + key, "expected a string");
    }
    return j[key].get<std::string>();
}

// Complex amplitudes accept a bare number or an [re, im] pair.
Complex get_complex(const Json& j, const std::string& path, const char* key)
{
    if (!j.contains(key)) {
        fail(path + "." + key, "missing required field");
    }
    const Json& v = j[key];
    if (v.is_number()) {
        return {v.get<double>(), 0.0};
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    fail(path + "." + key, "expected a number or [re, im] pair");
}

model::UnitSystem parse_unit(const Json& doc)
{
    model::UnitSystem unit;
    if (!doc.contains("unit")) {
        fail("unit", "missing required field");
    }
    const Json& u = doc["unit"];
    check_keys(u, "unit", {"mode", "gamma"});
    const std::string mode = get_string(u, "unit", "mode");
    if (mode == "dimensionless-gamma") {
        unit.mode = model::UnitSystem::Mode::DimensionlessGamma;
    } else if (mode == "si-angular") {
        unit.mode = model::UnitSystem::Mode::SiAngular;
    } else {
        fail("unit.mode", "expected 'dimensionless-gamma' or 'si-angular'");
    }
    unit.gamma_ref = get_number_or(u, "unit", "gamma", 1.0);
    return unit;
}

model::FluxQubitParams parse_qubit(const Json& doc, const char* key,
                                   const UnitScale& scale)
{
    if (!doc.contains(key)) {
        fail(key, "missing required field");
    }
    const Json& q = doc[key];
    check_keys(q, key, {"omega", "decay_rate"});
    model::FluxQubitParams p;
    p.omega = scale.frequency * get_number(q, key, "omega");
    p.decay_rate = scale.frequency * get_number_or(q, key, "decay_rate", 0.0);
    return p;
}

model::NVEParams parse_nve(const Json& doc, const model::UnitSystem& unit,
                           const UnitScale& scale)
{
    if (!doc.contains("nve")) {
        fail("nve", "missing required field");
    }
    const Json& n = doc["nve"];
    check_keys(n, "nve",
               {"omega_nv", "g", "n_spins", "fock_cutoff", "zero_field_d", "g_factor",
                "b_ext_z"});
    model::NVEParams p;
    p.omega_nv = scale.frequency * get_number(n, "nve", "omega_nv");
    p.g = scale.frequency * get_number(n, "nve", "g");
    p.n_spins = get_number_or(n, "nve", "n_spins", 1e6);
    const double cutoff = get_number_or(n, "nve", "fock_cutoff", 2.0);
    p.fock_cutoff = static_cast<int>(cutoff);
    if (static_cast<double>(p.fock_cutoff) != cutoff) {
        fail("nve.fock_cutoff", "expected an integer");
    }
    p.g_factor = get_number_or(n, "nve", "g_factor", model::constants::g_e_default);
    if (n.contains("zero_field_d") || n.contains("b_ext_z")) {
        if (unit.mode != model::UnitSystem::Mode::SiAngular) {
            fail("nve.zero_field_d", "field anchors require si-angular units");
        }
        p.zero_field_d = scale.frequency * get_number(n, "nve", "zero_field_d");
        p.b_ext_z = get_number(n, "nve", "b_ext_z");
    }
    return p;
}

std::optional<model::DriveParams> parse_drive(const Json& doc,
                                              const model::UnitSystem& unit,
                                              const UnitScale& scale)
{
    if (!doc.contains("drive")) {
        return std::nullopt;
    }
    if (unit.mode != model::UnitSystem::Mode::SiAngular) {
        fail("drive", "drive geometry (amperes, meters) requires si-angular units");
    }
    const Json& d = doc["drive"];
    check_keys(d, "drive",
               {"i_ext", "d_c", "d_n", "loop_side", "persistent_current",
                "drive_frequency", "rabi_c_override"});
    model::DriveParams p;
    p.i_ext = get_number(d, "drive", "i_ext");
    p.d_c = get_number(d, "drive", "d_c");
    p.d_n = get_number(d, "drive", "d_n");
    p.loop_side = get_number(d, "drive", "loop_side");
    p.persistent_current = get_number(d, "drive", "persistent_current");
    p.drive_frequency = scale.frequency * get_number_or(d, "drive", "drive_frequency", 0.0);
    if (d.contains("rabi_c_override")) {
        p.rabi_c_override = scale.frequency * get_number(d, "drive", "rabi_c_override");
    }
    return p;
}

std::optional<model::Schedule> parse_schedule(const Json& doc, const UnitScale& scale)
{
    if (!doc.contains("schedule")) {
        return std::nullopt;
    }
    const Json& s = doc["schedule"];
    check_keys(s, "schedule", {"omega_m", "j_t", "drive_window"});
    model::Schedule sched;
    if (s.contains("omega_m")) {
        const Json& r = s["omega_m"];
        check_keys(r, "schedule.omega_m", {"initial", "target", "tau", "shape"});
        model::OmegaRamp ramp;
        ramp.initial = scale.frequency * get_number(r, "schedule.omega_m", "initial");
        ramp.target = scale.frequency * get_number(r, "schedule.omega_m", "target");
        ramp.tau = scale.time * get_number(r, "schedule.omega_m", "tau");
        const std::string shape =
            r.contains("shape") ? get_string(r, "schedule.omega_m", "shape") : "linear";
        if (shape == "linear") {
            ramp.shape = model::RampShape::Linear;
        } else if (shape == "cosine") {
            ramp.shape = model::RampShape::Cosine;
        } else {
            fail("schedule.omega_m.shape", "expected 'linear' or 'cosine'");
        }
        sched.omega_m = ramp;
    }
    if (s.contains("j_t")) {
        if (!s["j_t"].is_array()) {
            fail("schedule.j_t", "expected an array of segments");
        }
        std::size_t k = 0;
        for (const Json& seg : s["j_t"]) {
            const std::string path = "schedule.j_t[" + std::to_string(k) + "]";
            check_keys(seg, path, {"t_from", "value"});
            model::JtSegment out;
            out.t_from = scale.time * get_number(seg, path, "t_from");
            out.value = scale.frequency * get_number(seg, path, "value");
            sched.j_t.push_back(out);
            ++k;
        }
    }
    if (s.contains("drive_window")) {
        const Json& w = s["drive_window"];
        check_keys(w, "schedule.drive_window",
                   {"t_start", "t_stop", "omega_c_rabi", "omega_nv_rabi"});
        model::DriveWindow win;
        win.t_start = scale.time * get_number(w, "schedule.drive_window", "t_start");
        win.t_stop = scale.time * get_number(w, "schedule.drive_window", "t_stop");
        win.omega_c_rabi =
            scale.frequency * get_number(w, "schedule.drive_window", "omega_c_rabi");
        win.omega_nv_rabi =
            scale.frequency * get_number(w, "schedule.drive_window", "omega_nv_rabi");
        sched.drive_window = win;
    }
    return sched;
}

} // namespace

UnitScale unit_scale(const model::UnitSystem& unit)
{
    if (unit.mode == model::UnitSystem::Mode::SiAngular) {
        return {kMhzToAngular, kNsToSeconds};
    }
    return {1.0, 1.0};
}

ParsedConfig parse_config(const std::string& text)
{
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(doc, "config",
               {"unit", "qubit_c", "qubit_m", "nve", "coupling", "drive", "schedule",
                "initial_state", "time", "scenario"});

    model::SystemConfig cfg;
    cfg.unit = parse_unit(doc);
    const UnitScale scale = unit_scale(cfg.unit);
    cfg.qubit_c = parse_qubit(doc, "qubit_c", scale);
    cfg.qubit_m = parse_qubit(doc, "qubit_m", scale);
    cfg.nve = parse_nve(doc, cfg.unit, scale);
    if (!doc.contains("coupling")) {
        fail("coupling", "missing required field");
    }
    check_keys(doc["coupling"], "coupling", {"j_t"});
    cfg.j_t = scale.frequency * get_number(doc["coupling"], "coupling", "j_t");
    cfg.drive = parse_drive(doc, cfg.unit, scale);
    cfg.schedule = parse_schedule(doc, scale);
    if (!doc.contains("initial_state")) {
        fail("initial_state", "missing required field");
    }
    check_keys(doc["initial_state"], "initial_state", {"alpha", "beta"});
    cfg.alpha = get_complex(doc["initial_state"], "initial_state", "alpha");
    cfg.beta = get_complex(doc["initial_state"], "initial_state", "beta");

    if (doc.contains("time")) {
        check_keys(doc["time"], "time", {"t_end", "n_points", "dt_max"});
    }
    if (doc.contains("scenario")) {
        check_keys(doc["scenario"], "scenario",
                   {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "sweep"});
    }

    cfg.validate();
    return {std::move(doc), std::move(cfg), text};
}

ParsedConfig load_config_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

void apply_override(Json& doc, const std::string& assignment)
{
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override must look like dotted.path=value: " + assignment);
    }
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    Json value;
    try {
        value = Json::parse(raw);
    } catch (const Json::parse_error&) {
        value = raw;  // unquoted strings like shape names
    }

    Json* node = &doc;
    std::size_t start = 0;
    for (;;) {
        const std::size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) {
            throw ConfigError("override path has an empty segment: " + path);
        }
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

ParsedConfig reparse(const Json& doc)
{
    return parse_config(doc.dump(2));
}

std::string config_hash(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream out;
    out << "fnv1a64:" << std::hex << h;
    return out.str();
}

} // namespace hybridmem::cli
