#include "hybridmem/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hybridmem/errors.hpp"

namespace hybridmem::model {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double v, const char* name)
{
    if (!(v > 0.0)) {
        std::ostringstream msg;
        msg << name << " must be positive, got " << v;
        throw ConfigError(msg.str());
    }
}

} // namespace

void Schedule::validate() const
{
    if (omega_m) {
        if (omega_m->tau < 0.0) {
            throw ConfigError("schedule.omega_m: ramp time must be >= 0");
        }
        require_positive(omega_m->initial, "schedule.omega_m.initial");
        require_positive(omega_m->target, "schedule.omega_m.target");
    }
    for (std::size_t k = 0; k + 1 < j_t.size(); ++k) {
        if (!(j_t[k].t_from < j_t[k + 1].t_from)) {
            throw ConfigError("schedule.j_t: segment boundaries must be strictly increasing");
        }
    }
    if (drive_window && !(drive_window->t_start < drive_window->t_stop)) {
        throw ConfigError("schedule.drive_window: start must precede stop");
    }
}

double Schedule::omega_m_at(double t, double fallback) const
{
    if (t < 0.0) {
        throw ConfigError("schedule lookup at t < 0 is outside the defined domain");
    }
    if (!omega_m) {
        return fallback;
    }
    const OmegaRamp& r = *omega_m;
    if (r.tau <= 0.0 || t >= r.tau) {
        return r.target;
    }
    const double x = t / r.tau;
    if (r.shape == RampShape::Linear) {
        return r.initial + (r.target - r.initial) * x;
    }
    return r.target + (r.initial - r.target) * 0.5 * (1.0 + std::cos(kPi * x));
}

double Schedule::j_t_at(double t, double fallback) const
{
    if (t < 0.0) {
        throw ConfigError("schedule lookup at t < 0 is outside the defined domain");
    }
    if (j_t.empty()) {
        return fallback;
    }
    if (t < j_t.front().t_from) {
        throw ConfigError("schedule lookup before the first j_t segment");
    }
    double value = j_t.front().value;
    for (const JtSegment& seg : j_t) {
        if (t >= seg.t_from) {
            value = seg.value;
        }
    }
    return value;
}

void SystemConfig::validate() const
{
    require_positive(unit.gamma_ref, "unit.gamma_ref");
    require_positive(qubit_c.omega, "qubit_c.omega");
    require_positive(qubit_m.omega, "qubit_m.omega");
    require_positive(nve.omega_nv, "nve.omega_nv");
    if (qubit_c.decay_rate < 0.0 || qubit_m.decay_rate < 0.0) {
        throw ConfigError("decay rates must be >= 0");
    }
    if (nve.fock_cutoff < 2) {
        throw ConfigError("nve.fock_cutoff must be >= 2");
    }
    if (nve.g < 0.0) {
        throw ConfigError("nve.g must be >= 0");
    }
    require_positive(nve.n_spins, "nve.n_spins");
    if (nve.zero_field_d && nve.b_ext_z) {
        const double derived =
            nv_transition_frequency(*nve.zero_field_d, nve.g_factor, *nve.b_ext_z);
        if (std::abs(nve.omega_nv - derived) > 1e-9 * std::abs(derived)) {
            std::ostringstream msg;
            msg << "nve.omega_nv = " << nve.omega_nv
                << " inconsistent with its field anchors (expected " << derived << ")";
            throw ConfigError(msg.str());
        }
    }
    if (drive) {
        require_positive(drive->i_ext, "drive.i_ext");
        require_positive(drive->d_c, "drive.d_c");
        require_positive(drive->d_n, "drive.d_n");
        require_positive(drive->loop_side, "drive.loop_side");
        require_positive(drive->persistent_current, "drive.persistent_current");
    }
    if (schedule) {
        schedule->validate();
    }
    const double norm = std::norm(alpha) + std::norm(beta);
    if (std::abs(norm - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "initial_state: amplitudes not normalized: |alpha|^2+|beta|^2 = " << norm;
        throw ConfigError(msg.str());
    }
}

double nv_transition_frequency(double zero_field_d, double g_e, double b_z_tesla)
{
    const double omega =
        zero_field_d - g_e * constants::mu_bohr * b_z_tesla / constants::hbar;
    if (!(omega > 0.0)) {
        std::ostringstream msg;
        msg << "nv_transition_frequency: nonpositive gap " << omega
            << " (two-level reduction invalid)";
        throw ConfigError(msg.str());
    }
    return omega;
}

double field_at_distance(double current, double distance)
{
    require_positive(distance, "distance");
    return constants::mu0 * current / (2.0 * kPi * distance);
}

double rabi_frequency_qubit(const DriveParams& p)
{
    const double area = p.loop_side * p.loop_side;
    return constants::mu0 * area * p.persistent_current * p.i_ext
         / (2.0 * kPi * constants::hbar * p.d_c);
}

double rabi_frequency_nve(const DriveParams& p, double n_spins, double g_e)
{
    return std::sqrt(n_spins) * g_e * constants::mu_bohr * constants::mu0 * p.i_ext
         / (2.0 * constants::hbar * kPi * p.d_n);
}

double effective_rabi_c(const DriveParams& p)
{
    return p.rabi_c_override ? *p.rabi_c_override : rabi_frequency_qubit(p);
}

double effective_lambda(double g, double j_t, double delta_nv, double delta_c)
{
    if (delta_nv == 0.0 || delta_c == 0.0) {
        throw ConfigError("effective_lambda: zero detuning (dispersive regime invalid)");
    }
    return 0.5 * g * j_t * (1.0 / delta_nv + 1.0 / delta_c);
}

ComplexMatrix build_h_rwa(const SystemConfig& cfg, double t)
{
    const int nc = cfg.nve.fock_cutoff;
    double omega_m = cfg.qubit_m.omega;
    double j_t = cfg.j_t;
    if (cfg.schedule) {
        omega_m = cfg.schedule->omega_m_at(t, omega_m);
        j_t = cfg.schedule->j_t_at(t, j_t);
    }

    const ComplexMatrix n_c = embed_c(qubit_number(), nc);
    const ComplexMatrix n_m = embed_m(qubit_number(), nc);
    const ComplexMatrix n_b = embed_nve(boson_number(nc), nc);
    const ComplexMatrix sm_c = embed_c(qubit_sigma_minus(), nc);
    const ComplexMatrix sm_m = embed_m(qubit_sigma_minus(), nc);
    const ComplexMatrix b = embed_nve(boson_annihilation(nc), nc);

    ComplexMatrix h = cfg.qubit_c.omega * n_c + omega_m * n_m + cfg.nve.omega_nv * n_b
                    + cfg.nve.g * (sm_m.adjoint() * b + b.adjoint() * sm_m)
                    + j_t * (sm_m.adjoint() * sm_c + sm_c.adjoint() * sm_m);

    if (cfg.schedule && cfg.schedule->drive_window) {
        const DriveWindow& w = *cfg.schedule->drive_window;
        if (t >= w.t_start && t < w.t_stop) {
            h += w.omega_c_rabi * (sm_c + sm_c.adjoint())
               + w.omega_nv_rabi * (b + b.adjoint());
        }
    }
    return h;
}

ComplexMatrix build_h_resonant(double g, double j_t, int fock_cutoff)
{
    const ComplexMatrix sm_c = embed_c(qubit_sigma_minus(), fock_cutoff);
    const ComplexMatrix sm_m = embed_m(qubit_sigma_minus(), fock_cutoff);
    const ComplexMatrix b = embed_nve(boson_annihilation(fock_cutoff), fock_cutoff);
    return g * (b.adjoint() * sm_m + b * sm_m.adjoint())
         + j_t * (sm_c * sm_m.adjoint() + sm_c.adjoint() * sm_m);
}

ComplexMatrix build_h_dispersive(const SystemConfig& cfg)
{
    const double d_c = cfg.delta_c();
    const double d_nv = cfg.delta_nv();
    const double lambda = effective_lambda(cfg.nve.g, cfg.j_t, d_nv, d_c);
    const int nc = cfg.nve.fock_cutoff;
    const ComplexMatrix n_c = embed_cn_qubit(qubit_number(), nc);
    const ComplexMatrix n_b = embed_cn_mode(boson_number(nc), nc);
    const ComplexMatrix sm_c = embed_cn_qubit(qubit_sigma_minus(), nc);
    const ComplexMatrix b = embed_cn_mode(boson_annihilation(nc), nc);
    return (d_nv + cfg.nve.g * cfg.nve.g / d_nv) * n_b
         + (d_c + cfg.j_t * cfg.j_t / d_c) * n_c
         + lambda * (sm_c * b.adjoint() + sm_c.adjoint() * b);
}

bool dispersive_regime_valid(const SystemConfig& cfg)
{
    const double strongest = std::max(cfg.nve.g, cfg.j_t);
    return std::min(std::abs(cfg.delta_c()), std::abs(cfg.delta_nv())) >= 5.0 * strongest;
}

ComplexMatrix build_h_single(double g, int fock_cutoff)
{
    const ComplexMatrix sm_c = embed_cn_qubit(qubit_sigma_minus(), fock_cutoff);
    const ComplexMatrix b = embed_cn_mode(boson_annihilation(fock_cutoff), fock_cutoff);
    return g * (b.adjoint() * sm_c + b * sm_c.adjoint());
}

ComplexMatrix build_h_lab(const SystemConfig& cfg)
{
    const int nc = cfg.nve.fock_cutoff;
    const ComplexMatrix sx_c = embed_c(qubit_sigma_x(), nc);
    const ComplexMatrix sx_m = embed_m(qubit_sigma_x(), nc);
    const ComplexMatrix sz_c = embed_c(qubit_sigma_z_flux(), nc);
    const ComplexMatrix sz_m = embed_m(qubit_sigma_z_flux(), nc);
    const ComplexMatrix n_b = embed_nve(boson_number(nc), nc);
    const ComplexMatrix b = embed_nve(boson_annihilation(nc), nc);
    return 0.5 * (cfg.qubit_c.omega * sx_c + cfg.qubit_m.omega * sx_m)
         + cfg.nve.omega_nv * n_b
         + cfg.nve.g * sz_m * (b + b.adjoint())
         + cfg.j_t * sz_m * sz_c;
}

ComplexMatrix lab_to_eigen_basis(int fock_cutoff)
{
    ComplexMatrix w = ComplexMatrix::Zero(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    w(0, 0) = s;   // |ground> = (|0> - |1>)/sqrt(2)
    w(1, 0) = -s;
    w(0, 1) = s;   // |excited> = (|0> + |1>)/sqrt(2)
    w(1, 1) = s;
    const ComplexMatrix in = ComplexMatrix::Identity(fock_cutoff, fock_cutoff);
    return linalg::kron(linalg::kron(w, w), in);
}

ComplexMatrix build_drive_terms(const DriveParams& p, double n_spins, double g_e,
                                int fock_cutoff)
{
    const double omega_c = effective_rabi_c(p);
    const double omega_nv = rabi_frequency_nve(p, n_spins, g_e);
    const ComplexMatrix sm_c = embed_c(qubit_sigma_minus(), fock_cutoff);
    const ComplexMatrix b = embed_nve(boson_annihilation(fock_cutoff), fock_cutoff);
    return omega_c * (sm_c + sm_c.adjoint()) + omega_nv * (b + b.adjoint());
}

ComplexMatrix build_drive_terms_cn(const DriveParams& p, double n_spins, double g_e,
                                   int fock_cutoff)
{
    const double omega_c = effective_rabi_c(p);
    const double omega_nv = rabi_frequency_nve(p, n_spins, g_e);
    const ComplexMatrix sm_c = embed_cn_qubit(qubit_sigma_minus(), fock_cutoff);
    const ComplexMatrix b = embed_cn_mode(boson_annihilation(fock_cutoff), fock_cutoff);
    return omega_c * (sm_c + sm_c.adjoint()) + omega_nv * (b + b.adjoint());
}

std::vector<ComplexMatrix> collapse_operators(const SystemConfig& cfg)
{
    if (cfg.qubit_m.decay_rate < 0.0 || cfg.qubit_c.decay_rate < 0.0) {
        throw ConfigError("collapse_operators: decay rates must be >= 0");
    }
    const int nc = cfg.nve.fock_cutoff;
    std::vector<ComplexMatrix> out;
    out.push_back(std::sqrt(cfg.qubit_m.decay_rate) * embed_m(qubit_sigma_minus(), nc));
    out.push_back(std::sqrt(cfg.qubit_c.decay_rate) * embed_c(qubit_sigma_minus(), nc));
    return out;
}

} // namespace hybridmem::model
