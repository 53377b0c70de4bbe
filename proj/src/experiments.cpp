#include "hybridmem/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "hybridmem/analytic.hpp"
#include "hybridmem/errors.hpp"

namespace hybridmem::experiments {

namespace {

constexpr double kPi = std::numbers::pi;

using model::SystemConfig;

void check_amplitudes(Complex alpha, Complex beta)
{
    const double norm = std::norm(alpha) + std::norm(beta);
    if (std::abs(norm - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "amplitudes not normalized: |alpha|^2+|beta|^2 = " << norm;
        throw ConfigError(msg.str());
    }
}

void check_fidelity_value(double f)
{
    if (!std::isfinite(f) || f < -1e-9 || f > 1.0 + 1e-9) {
        std::ostringstream msg;
        msg << "fidelity outside [0,1]: " << f;
        throw NumericalError(msg.str());
    }
}

// Static-Hamiltonian fidelity reduction used by the sweep evaluators.
double reduce_fidelity(const ComplexMatrix& h, const ComplexVector& psi0,
                       const ComplexVector& target, Reduction reduction,
                       double t_nominal, double t_window, int n_points)
{
    if (reduction == Reduction::AtNominalTransferTime) {
        dynamics::TimeGrid grid{0.0, t_nominal, 2, t_nominal};
        const dynamics::Trajectory traj = dynamics::evolve_pure(h, psi0, grid);
        const double f = fidelity(traj.pure_states.back(), target);
        check_fidelity_value(f);
        return f;
    }
    dynamics::TimeGrid grid{0.0, t_window, n_points, t_window};
    const dynamics::Trajectory traj = dynamics::evolve_pure(h, psi0, grid);
    double best = 0.0;
    for (const ComplexVector& s : traj.pure_states) {
        best = std::max(best, fidelity(s, target));
    }
    check_fidelity_value(best);
    return best;
}

double evaluate_resonant_cell(const SystemConfig& cfg, Reduction reduction,
                              TargetConvention convention)
{
    const ComplexMatrix h = h_full_coupler_frame(cfg);
    const ComplexVector psi0 = initial_state_full(cfg);
    const ComplexVector target = target_state(cfg.alpha, cfg.beta, convention,
                                              TransferKind::Resonant, cfg.nve.fock_cutoff);
    const double t_nominal = analytic::resonant_transfer_time(cfg.j_t);
    return reduce_fidelity(h, psi0, target, reduction, t_nominal, 2.0 * t_nominal, 1601);
}

double evaluate_dispersive_cell(const SystemConfig& cfg, Reduction reduction,
                                TargetConvention convention)
{
    double lambda_ideal = 0.0;
    try {
        lambda_ideal = model::effective_lambda(cfg.j_t, cfg.j_t, cfg.delta_nv(),
                                               cfg.delta_c());
    } catch (const ConfigError&) {
        throw ConfigError("dispersive cell: zero detuning makes the transfer window degenerate");
    }
    if (lambda_ideal == 0.0 || !std::isfinite(lambda_ideal)) {
        throw ConfigError("dispersive cell: degenerate transfer window (Lambda_ideal = 0)");
    }
    const double t_nominal = 0.5 * kPi / std::abs(lambda_ideal);
    const ComplexMatrix h = h_full_coupler_frame(cfg);
    const ComplexVector psi0 = initial_state_full(cfg);
    const ComplexVector target = target_state(cfg.alpha, cfg.beta, convention,
                                              TransferKind::Dispersive, cfg.nve.fock_cutoff);
    return reduce_fidelity(h, psi0, target, reduction, t_nominal, 3.0 * t_nominal, 3001);
}

using CellEvaluator = double (*)(const SystemConfig&, Reduction, TargetConvention);

CellEvaluator evaluator_for(const std::string& scenario)
{
    if (scenario == "resonant") {
        return evaluate_resonant_cell;
    }
    if (scenario == "dispersive") {
        return evaluate_dispersive_cell;
    }
    throw ConfigError("unknown sweep scenario: " + scenario);
}

void check_axes(const SweepSpec& spec)
{
    if (spec.axes.empty() || spec.axes.size() > 2) {
        throw ConfigError("sweep requires one or two axes");
    }
    for (const SweepAxis& axis : spec.axes) {
        if (axis.values.empty()) {
            throw ConfigError("sweep axis '" + axis.path + "' is empty");
        }
        for (double v : axis.values) {
            if (!std::isfinite(v)) {
                throw ConfigError("sweep axis '" + axis.path + "' has a non-finite value");
            }
        }
    }
}

// Applies one detuning-heatmap axis to a config copy.
void apply_heatmap_axis(SystemConfig& cfg, const std::string& name, double value)
{
    if (name == "delta_c") {
        cfg.qubit_c.omega = cfg.qubit_m.omega - value;
    } else if (name == "delta_nv") {
        cfg.nve.omega_nv = cfg.qubit_m.omega - value;
    } else if (name == "delta") {
        cfg.qubit_c.omega = cfg.qubit_m.omega - value;
        cfg.nve.omega_nv = cfg.qubit_m.omega - value;
    } else if (name == "lambda") {
        if (value == 1.0) {
            throw ConfigError("coupling mismatch lambda = 1 leaves no ensemble coupling");
        }
        cfg.nve.g = cfg.j_t * (1.0 - value);
    } else {
        throw ConfigError("unknown heatmap axis '" + name +
                          "' (expected delta_c, delta_nv, delta or lambda)");
    }
}

SweepResult run_heatmap(const SystemConfig& cfg, const SweepSpec& spec,
                        const RunOptions& opts, CellEvaluator evaluate,
                        Reduction reduction)
{
    cfg.validate();
    check_axes(spec);
    for (const SweepAxis& axis : spec.axes) {
        if (axis.path == "lambda") {
            for (double v : axis.values) {
                if (v == 1.0) {
                    throw ConfigError("coupling mismatch lambda = 1 leaves no ensemble coupling");
                }
            }
        }
    }
    const std::size_t n1 = spec.axes[0].values.size();
    const std::size_t n2 = spec.axes.size() == 2 ? spec.axes[1].values.size() : 1;

    SweepResult result;
    result.axes = spec.axes;
    result.grid = grid_map(n1 * n2, [&](std::size_t cell) {
        SystemConfig local = cfg;
        apply_heatmap_axis(local, spec.axes[0].path, spec.axes[0].values[cell / n2]);
        if (spec.axes.size() == 2) {
            apply_heatmap_axis(local, spec.axes[1].path, spec.axes[1].values[cell % n2]);
        }
        local.validate();
        return evaluate(local, reduction, opts.convention);
    }, opts.workers);
    return result;
}

ComplexMatrix dispersive_transfer_frame(double delta, double g, double j_t, int nc)
{
    const ComplexMatrix n_c = model::embed_c(model::qubit_number(), nc);
    const ComplexMatrix n_b = model::embed_nve(model::boson_number(nc), nc);
    return model::build_h_resonant(g, j_t, nc) - delta * (n_c + n_b);
}

double spectral_radius(const ComplexMatrix& h)
{
    const linalg::Eigensystem es = linalg::eig_hermitian(h);
    return std::max(std::abs(es.values.minCoeff()), std::abs(es.values.maxCoeff()));
}

} // namespace

Complex transfer_phase(TransferKind kind)
{
    return kind == TransferKind::Resonant ? Complex(-1.0, 0.0) : Complex(0.0, -1.0);
}

ComplexVector target_state(Complex alpha, Complex beta, TargetConvention convention,
                           TransferKind kind, int fock_cutoff)
{
    check_amplitudes(alpha, beta);
    const Complex stored = convention == TargetConvention::PhaseCorrected
                               ? beta * transfer_phase(kind)
                               : beta;
    ComplexVector t = ComplexVector::Zero(4 * fock_cutoff);
    t(model::basis_index(0, 0, 0, fock_cutoff)) = alpha;
    t(model::basis_index(0, 0, 1, fock_cutoff)) = stored;
    return t;
}

ComplexVector target_state_cn(Complex alpha, Complex beta, TargetConvention convention,
                              TransferKind kind, int fock_cutoff)
{
    check_amplitudes(alpha, beta);
    const Complex stored = convention == TargetConvention::PhaseCorrected
                               ? beta * transfer_phase(kind)
                               : beta;
    ComplexVector t = ComplexVector::Zero(2 * fock_cutoff);
    t(model::basis_index_cn(0, 0, fock_cutoff)) = alpha;
    t(model::basis_index_cn(0, 1, fock_cutoff)) = stored;
    return t;
}

double fidelity(const ComplexVector& state, const ComplexVector& target)
{
    if (state.size() != target.size()) {
        throw ConfigError("fidelity: state and target dimensions differ");
    }
    return std::norm(target.dot(state));
}

double fidelity(const ComplexMatrix& rho, const ComplexVector& target)
{
    if (rho.rows() != target.size() || rho.cols() != target.size()) {
        throw ConfigError("fidelity: density matrix and target dimensions differ");
    }
    const Complex value = target.dot(rho * target);
    return value.real();
}

ComplexVector initial_state_full(const model::SystemConfig& cfg)
{
    check_amplitudes(cfg.alpha, cfg.beta);
    ComplexVector psi = ComplexVector::Zero(cfg.dim());
    psi(model::basis_index(0, 0, 0, cfg.nve.fock_cutoff)) = cfg.alpha;
    psi(model::basis_index(1, 0, 0, cfg.nve.fock_cutoff)) = cfg.beta;
    return psi;
}

ComplexVector initial_state_cn(const model::SystemConfig& cfg)
{
    check_amplitudes(cfg.alpha, cfg.beta);
    ComplexVector psi = ComplexVector::Zero(2 * cfg.nve.fock_cutoff);
    psi(model::basis_index_cn(0, 0, cfg.nve.fock_cutoff)) = cfg.alpha;
    psi(model::basis_index_cn(1, 0, cfg.nve.fock_cutoff)) = cfg.beta;
    return psi;
}

ComplexMatrix h_full_coupler_frame(const model::SystemConfig& cfg)
{
    const int nc = cfg.nve.fock_cutoff;
    return model::build_h_rwa(cfg, 0.0)
         - cfg.qubit_m.omega * model::excitation_number(nc);
}

void annotate_full(dynamics::Trajectory& traj, int fock_cutoff,
                   const ComplexVector& target)
{
    const ComplexMatrix n_c = model::embed_c(model::qubit_number(), fock_cutoff);
    const ComplexMatrix n_m = model::embed_m(model::qubit_number(), fock_cutoff);
    const ComplexMatrix n_b = model::embed_nve(model::boson_number(fock_cutoff), fock_cutoff);
    const std::size_t n = traj.size();
    traj.fidelity.assign(target.size() > 0 ? n : 0, 0.0);
    traj.pop_c.assign(n, 0.0);
    traj.pop_m.assign(n, 0.0);
    traj.pop_nve.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (traj.is_density()) {
            const ComplexMatrix& rho = traj.density_states[k];
            traj.pop_c[k] = dynamics::expectation(rho, n_c);
            traj.pop_m[k] = dynamics::expectation(rho, n_m);
            traj.pop_nve[k] = dynamics::expectation(rho, n_b);
            if (target.size() > 0) {
                traj.fidelity[k] = fidelity(rho, target);
            }
        } else {
            const ComplexVector& psi = traj.pure_states[k];
            traj.pop_c[k] = dynamics::expectation(psi, n_c);
            traj.pop_m[k] = dynamics::expectation(psi, n_m);
            traj.pop_nve[k] = dynamics::expectation(psi, n_b);
            if (target.size() > 0) {
                traj.fidelity[k] = fidelity(psi, target);
            }
        }
    }
}

void annotate_cn(dynamics::Trajectory& traj, int fock_cutoff,
                 const ComplexVector& target)
{
    const ComplexMatrix n_c = model::embed_cn_qubit(model::qubit_number(), fock_cutoff);
    const ComplexMatrix n_b = model::embed_cn_mode(model::boson_number(fock_cutoff), fock_cutoff);
    const std::size_t n = traj.size();
    traj.fidelity.assign(target.size() > 0 ? n : 0, 0.0);
    traj.pop_c.assign(n, 0.0);
    traj.pop_m.clear();
    traj.pop_nve.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (traj.is_density()) {
            const ComplexMatrix& rho = traj.density_states[k];
            traj.pop_c[k] = dynamics::expectation(rho, n_c);
            traj.pop_nve[k] = dynamics::expectation(rho, n_b);
            if (target.size() > 0) {
                traj.fidelity[k] = fidelity(rho, target);
            }
        } else {
            const ComplexVector& psi = traj.pure_states[k];
            traj.pop_c[k] = dynamics::expectation(psi, n_c);
            traj.pop_nve[k] = dynamics::expectation(psi, n_b);
            if (target.size() > 0) {
                traj.fidelity[k] = fidelity(psi, target);
            }
        }
    }
}

dynamics::Trajectory run_resonant_storage(const model::SystemConfig& cfg,
                                          const RunOptions& opts, int n_points)
{
    cfg.validate();
    const double scale = std::max(cfg.qubit_m.omega, 1.0);
    if (std::abs(cfg.delta_c()) > 1e-9 * scale || std::abs(cfg.delta_nv()) > 1e-9 * scale) {
        throw ConfigError("resonant storage requires zero detunings");
    }
    const int nc = cfg.nve.fock_cutoff;
    const double t_star = analytic::resonant_transfer_time(cfg.j_t);
    const int n = n_points > 1 ? n_points : 2001;
    dynamics::TimeGrid grid{0.0, 4.0 * t_star, n, t_star};

    const ComplexMatrix h = model::build_h_resonant(cfg.nve.g, cfg.j_t, nc);
    dynamics::Trajectory traj = dynamics::evolve_pure(h, initial_state_full(cfg), grid);
    annotate_full(traj, nc, target_state(cfg.alpha, cfg.beta, opts.convention,
                                         TransferKind::Resonant, nc));
    return traj;
}

SweepResult run_ramp_sweep(const model::SystemConfig& cfg,
                           const std::vector<double>& taus,
                           const std::vector<double>& delta_maxes,
                           const RunOptions& opts)
{
    cfg.validate();
    if (taus.empty() || delta_maxes.empty()) {
        throw ConfigError("ramp sweep: tau and delta_max axes must be nonempty");
    }
    for (double tau : taus) {
        if (!(tau >= 0.0) || !std::isfinite(tau)) {
            throw ConfigError("ramp sweep: tau values must be >= 0");
        }
    }
    const double scale = std::max(cfg.qubit_m.omega, 1.0);
    if (std::abs(cfg.qubit_c.omega - cfg.nve.omega_nv) > 1e-9 * scale) {
        throw ConfigError("ramp sweep requires omega_C = omega_NV");
    }
    const int nc = cfg.nve.fock_cutoff;
    const double g = cfg.nve.g;
    const double j_t = cfg.j_t;
    const model::RampShape shape = (cfg.schedule && cfg.schedule->omega_m)
                                       ? cfg.schedule->omega_m->shape
                                       : model::RampShape::Linear;
    const ComplexMatrix h_res = model::build_h_resonant(g, j_t, nc);
    const ComplexMatrix n_m = model::embed_m(model::qubit_number(), nc);
    const ComplexVector psi0 = initial_state_full(cfg);
    const ComplexVector target = target_state(cfg.alpha, cfg.beta, opts.convention,
                                              TransferKind::Resonant, nc);
    const double t_star = analytic::resonant_transfer_time(cfg.j_t);
    const double post_window = 2.5 * t_star;

    const std::size_t n_tau = taus.size();
    const std::size_t n_dm = delta_maxes.size();
    SweepResult result;
    result.axes = {{"tau", taus}, {"delta_max", delta_maxes}};
    result.grid = grid_map(n_tau * n_dm, [&](std::size_t cell) {
        const double tau = taus[cell / n_dm];
        const double d_max = delta_maxes[cell % n_dm];
        ComplexVector psi = psi0;
        if (tau > 0.0) {
            const double omega_fast =
                std::max({std::abs(d_max), g, j_t, 2.0 * kPi / tau});
            dynamics::TimeGrid ramp_grid{
                0.0, tau, 2,
                opts.dt_scale * dynamics::default_dt_max(
                    omega_fast, dynamics::kRampStepsPerPeriod)};
            auto h_of_t = [&](double t) {
                const double x = t / tau;
                const double delta = shape == model::RampShape::Linear
                                         ? d_max * (1.0 - x)
                                         : d_max * 0.5 * (1.0 + std::cos(kPi * x));
                return ComplexMatrix(h_res + delta * n_m);
            };
            psi = dynamics::evolve_pure(h_of_t, psi, ramp_grid).pure_states.back();
        }
        const double f = reduce_fidelity(h_res, psi, target, Reduction::MaxOverTime,
                                         t_star, post_window, 4001);
        return f;
    }, opts.workers);
    return result;
}

SweepResult run_detuning_heatmap(const model::SystemConfig& cfg, const SweepSpec& spec,
                                 const RunOptions& opts)
{
    return run_heatmap(cfg, spec, opts, evaluate_resonant_cell, spec.reduction);
}

DispersiveComparison run_dispersive_compare(const model::SystemConfig& cfg,
                                            const RunOptions& opts, int n_points)
{
    cfg.validate();
    const int nc = cfg.nve.fock_cutoff;
    const double lambda_ideal =
        model::effective_lambda(cfg.j_t, cfg.j_t, cfg.delta_nv(), cfg.delta_c());
    if (lambda_ideal == 0.0) {
        throw ConfigError("dispersive comparison: degenerate window (Lambda_ideal = 0)");
    }
    const double lambda_eff =
        model::effective_lambda(cfg.nve.g, cfg.j_t, cfg.delta_nv(), cfg.delta_c());
    const double t_end = 1.5 * kPi / std::abs(lambda_ideal);
    dynamics::TimeGrid grid{0.0, t_end, n_points, t_end};

    DispersiveComparison out;
    out.lambda_eff = lambda_eff;
    out.t_transfer = lambda_eff != 0.0 ? 0.5 * kPi / std::abs(lambda_eff) : 0.0;
    out.regime_warning = !model::dispersive_regime_valid(cfg);

    const ComplexMatrix h_full = h_full_coupler_frame(cfg);
    out.full = dynamics::evolve_pure(h_full, initial_state_full(cfg), grid);
    annotate_full(out.full, nc, target_state(cfg.alpha, cfg.beta, opts.convention,
                                             TransferKind::Dispersive, nc));

    const double diag_c = cfg.delta_c() + cfg.j_t * cfg.j_t / cfg.delta_c();
    const double diag_nv = cfg.delta_nv() + cfg.nve.g * cfg.nve.g / cfg.delta_nv();
    const ComplexMatrix h_eff = model::build_h_dispersive(cfg)
        - 0.5 * (diag_c + diag_nv) * model::excitation_number_cn(nc);
    out.effective = dynamics::evolve_pure(h_eff, initial_state_cn(cfg), grid);
    annotate_cn(out.effective, nc, target_state_cn(cfg.alpha, cfg.beta, opts.convention,
                                                   TransferKind::Dispersive, nc));
    return out;
}

SweepResult run_dispersive_heatmap(const model::SystemConfig& cfg, const SweepSpec& spec,
                                   const RunOptions& opts)
{
    return run_heatmap(cfg, spec, opts, evaluate_dispersive_cell, spec.reduction);
}

SeparationStudy run_separation_study(const model::SystemConfig& cfg,
                                     const std::vector<double>& d_n_values,
                                     double theta, ProtocolMode mode,
                                     double delta_dispersive,
                                     const RunOptions& opts, double d_n_series)
{
    cfg.validate();
    if (!cfg.drive) {
        throw ConfigError("separation study requires drive parameters");
    }
    if (d_n_values.empty()) {
        throw ConfigError("separation study: empty distance list");
    }
    const double omega_c_rabi = model::effective_rabi_c(*cfg.drive);
    if (!(omega_c_rabi > 0.0)) {
        throw ConfigError("separation study: Omega_C must be positive");
    }
    if (mode == ProtocolMode::Dispersive && delta_dispersive == 0.0) {
        throw ConfigError("separation study: dispersive mode needs a nonzero detuning");
    }
    const int nc = cfg.nve.fock_cutoff;
    const double g = cfg.nve.g;
    if (!(g > 0.0)) {
        throw ConfigError("separation study: ensemble coupling g must be positive");
    }
    const double t_rot = theta / omega_c_rabi;
    const Complex alpha_rot(std::cos(theta), 0.0);
    const Complex beta_rot(0.0, -std::sin(theta));

    // Transfer stage of the proposed architecture, J_t = g.
    ComplexMatrix h_transfer;
    double transfer_window = 0.0;
    TransferKind kind;
    if (mode == ProtocolMode::Resonant) {
        h_transfer = model::build_h_resonant(g, g, nc);
        transfer_window = 2.0 * analytic::resonant_transfer_time(g);
        kind = TransferKind::Resonant;
    } else {
        h_transfer = dispersive_transfer_frame(delta_dispersive, g, g, nc);
        const double lambda = g * g / delta_dispersive;
        transfer_window = 1.5 * 0.5 * kPi / std::abs(lambda);
        kind = TransferKind::Dispersive;
    }
    const ComplexVector target_prop =
        target_state(alpha_rot, beta_rot, opts.convention, kind, nc);

    // Single-circuit architecture: the same exchange performs the transfer in
    // both modes (no coupler, hence no detuning knob).
    const ComplexMatrix h_single = model::build_h_single(g, nc);
    const double single_window = kPi / g;  // 2x the pi/(2g) swap time
    const ComplexVector target_single = target_state_cn(
        alpha_rot, beta_rot, opts.convention, TransferKind::Dispersive, nc);

    ComplexVector vac_full = ComplexVector::Zero(4 * nc);
    vac_full(model::basis_index(0, 0, 0, nc)) = 1.0;
    ComplexVector vac_cn = ComplexVector::Zero(2 * nc);
    vac_cn(model::basis_index_cn(0, 0, nc)) = 1.0;

    auto rotated_proposed = [&](double d_n) {
        model::DriveParams p = *cfg.drive;
        p.d_n = d_n;
        const ComplexMatrix h_rot =
            model::build_drive_terms(p, cfg.nve.n_spins, cfg.nve.g_factor, nc);
        dynamics::TimeGrid grid{0.0, t_rot, 2, t_rot};
        return dynamics::evolve_pure(h_rot, vac_full, grid).pure_states.back();
    };
    auto rotated_single = [&](double d_n) {
        model::DriveParams p = *cfg.drive;
        p.d_n = d_n;
        const ComplexMatrix h_rot =
            model::build_drive_terms_cn(p, cfg.nve.n_spins, cfg.nve.g_factor, nc)
            + h_single;
        dynamics::TimeGrid grid{0.0, t_rot, 2, t_rot};
        return dynamics::evolve_pure(h_rot, vac_cn, grid).pure_states.back();
    };

    SeparationStudy out;
    out.d_n_values = d_n_values;
    out.d_n_series = d_n_series;
    out.fidelity_proposed = grid_map(d_n_values.size(), [&](std::size_t i) {
        return reduce_fidelity(h_transfer, rotated_proposed(d_n_values[i]), target_prop,
                               Reduction::MaxOverTime, 0.0, transfer_window, 3001);
    }, opts.workers);
    out.fidelity_single = grid_map(d_n_values.size(), [&](std::size_t i) {
        return reduce_fidelity(h_single, rotated_single(d_n_values[i]), target_single,
                               Reduction::MaxOverTime, 0.0, single_window, 3001);
    }, opts.workers);

    // theta time series at d_n_series: rotation stage then transfer stage on
    // one continuous timeline.
    {
        model::DriveParams p = *cfg.drive;
        p.d_n = d_n_series;
        const ComplexMatrix h_rot =
            model::build_drive_terms(p, cfg.nve.n_spins, cfg.nve.g_factor, nc);
        dynamics::TimeGrid rot_grid{0.0, t_rot, 301, t_rot};
        dynamics::Trajectory stage1 = dynamics::evolve_pure(h_rot, vac_full, rot_grid);
        dynamics::TimeGrid tr_grid{0.0, transfer_window, 2401, transfer_window};
        dynamics::Trajectory stage2 =
            dynamics::evolve_pure(h_transfer, stage1.pure_states.back(), tr_grid);
        annotate_full(stage1, nc, target_prop);
        annotate_full(stage2, nc, target_prop);
        out.proposed_series = stage1;
        for (std::size_t k = 1; k < stage2.size(); ++k) {
            out.proposed_series.times.push_back(t_rot + stage2.times[k]);
            out.proposed_series.pure_states.push_back(stage2.pure_states[k]);
            out.proposed_series.norm_or_trace.push_back(stage2.norm_or_trace[k]);
            out.proposed_series.fidelity.push_back(stage2.fidelity[k]);
            out.proposed_series.pop_c.push_back(stage2.pop_c[k]);
            out.proposed_series.pop_m.push_back(stage2.pop_m[k]);
            out.proposed_series.pop_nve.push_back(stage2.pop_nve[k]);
        }

        const ComplexMatrix h_rot_s =
            model::build_drive_terms_cn(p, cfg.nve.n_spins, cfg.nve.g_factor, nc)
            + h_single;
        dynamics::Trajectory s_stage1 = dynamics::evolve_pure(h_rot_s, vac_cn, rot_grid);
        dynamics::TimeGrid s_tr_grid{0.0, single_window, 2401, single_window};
        dynamics::Trajectory s_stage2 =
            dynamics::evolve_pure(h_single, s_stage1.pure_states.back(), s_tr_grid);
        annotate_cn(s_stage1, nc, target_single);
        annotate_cn(s_stage2, nc, target_single);
        out.single_series = s_stage1;
        for (std::size_t k = 1; k < s_stage2.size(); ++k) {
            out.single_series.times.push_back(t_rot + s_stage2.times[k]);
            out.single_series.pure_states.push_back(s_stage2.pure_states[k]);
            out.single_series.norm_or_trace.push_back(s_stage2.norm_or_trace[k]);
            out.single_series.fidelity.push_back(s_stage2.fidelity[k]);
            out.single_series.pop_c.push_back(s_stage2.pop_c[k]);
            out.single_series.pop_nve.push_back(s_stage2.pop_nve[k]);
        }
    }
    return out;
}

DecoherenceStudy run_decoherence_study(const model::SystemConfig& cfg,
                                       const std::vector<double>& gammas,
                                       double delta_dispersive,
                                       const RunOptions& opts)
{
    cfg.validate();
    if (gammas.empty()) {
        throw ConfigError("decoherence study: empty decay-rate list");
    }
    for (double gamma : gammas) {
        if (!(gamma >= 0.0)) {
            throw ConfigError("decoherence study: decay rates must be >= 0");
        }
    }
    if (delta_dispersive == 0.0) {
        throw ConfigError("decoherence study: dispersive protocol needs a nonzero detuning");
    }
    const int nc = cfg.nve.fock_cutoff;
    const double g = cfg.nve.g;
    const double j_t = cfg.j_t;
    if (!(g > 0.0) || !(j_t > 0.0)) {
        throw ConfigError("decoherence study: couplings must be positive");
    }

    const ComplexVector psi0 = initial_state_full(cfg);
    const ComplexMatrix rho0 = psi0 * psi0.adjoint();

    const ComplexMatrix h_res = model::build_h_resonant(g, j_t, nc);
    const double t_res = analytic::resonant_transfer_time(g);
    const ComplexMatrix h_disp = dispersive_transfer_frame(delta_dispersive, g, j_t, nc);
    const double lambda_ideal = j_t * j_t / delta_dispersive;
    const double t_disp = 0.5 * kPi / std::abs(lambda_ideal);

    const ComplexVector target_res = target_state(cfg.alpha, cfg.beta, opts.convention,
                                                  TransferKind::Resonant, nc);
    const ComplexVector target_disp = target_state(cfg.alpha, cfg.beta, opts.convention,
                                                   TransferKind::Dispersive, nc);

    const double dt_res = opts.dt_scale * dynamics::default_dt_max(
        spectral_radius(h_res), dynamics::kLindbladStepsPerPeriod);
    const double dt_disp = opts.dt_scale * dynamics::default_dt_max(
        spectral_radius(h_disp), dynamics::kLindbladStepsPerPeriod);

    DecoherenceStudy out;
    out.gammas = gammas;
    for (double gamma : gammas) {
        model::SystemConfig local = cfg;
        local.qubit_c.decay_rate = gamma;
        local.qubit_m.decay_rate = gamma;
        const std::vector<ComplexMatrix> collapse = model::collapse_operators(local);

        dynamics::TimeGrid grid_res{0.0, 2.0 * t_res, 401, dt_res};
        dynamics::Trajectory tr = dynamics::evolve_lindblad(h_res, collapse, rho0, grid_res);
        annotate_full(tr, nc, target_res);
        out.resonant.push_back(std::move(tr));

        dynamics::TimeGrid grid_disp{0.0, 1.5 * t_disp, 601, dt_disp};
        dynamics::Trajectory td = dynamics::evolve_lindblad(h_disp, collapse, rho0, grid_disp);
        annotate_full(td, nc, target_disp);
        out.dispersive.push_back(std::move(td));
    }
    return out;
}

void set_parameter(model::SystemConfig& cfg, const std::string& path, double value)
{
    if (path == "qubit_c.omega") {
        cfg.qubit_c.omega = value;
    } else if (path == "qubit_c.decay_rate") {
        cfg.qubit_c.decay_rate = value;
    } else if (path == "qubit_m.omega") {
        cfg.qubit_m.omega = value;
    } else if (path == "qubit_m.decay_rate") {
        cfg.qubit_m.decay_rate = value;
    } else if (path == "nve.omega_nv") {
        cfg.nve.omega_nv = value;
    } else if (path == "nve.g") {
        cfg.nve.g = value;
    } else if (path == "nve.n_spins") {
        cfg.nve.n_spins = value;
    } else if (path == "nve.fock_cutoff") {
        cfg.nve.fock_cutoff = static_cast<int>(value);
    } else if (path == "coupling.j_t") {
        cfg.j_t = value;
    } else if (path == "drive.i_ext" && cfg.drive) {
        cfg.drive->i_ext = value;
    } else if (path == "drive.d_c" && cfg.drive) {
        cfg.drive->d_c = value;
    } else if (path == "drive.d_n" && cfg.drive) {
        cfg.drive->d_n = value;
    } else {
        throw ConfigError("unresolvable parameter path: " + path);
    }
}

SweepResult sweep(const model::SystemConfig& cfg, const SweepSpec& spec,
                  const RunOptions& opts)
{
    cfg.validate();
    check_axes(spec);
    const CellEvaluator evaluate = evaluator_for(spec.scenario);
    const std::size_t n1 = spec.axes[0].values.size();
    const std::size_t n2 = spec.axes.size() == 2 ? spec.axes[1].values.size() : 1;

    SweepResult result;
    result.axes = spec.axes;
    result.grid = grid_map(n1 * n2, [&](std::size_t cell) {
        model::SystemConfig local = cfg;
        set_parameter(local, spec.axes[0].path, spec.axes[0].values[cell / n2]);
        if (spec.axes.size() == 2) {
            set_parameter(local, spec.axes[1].path, spec.axes[1].values[cell % n2]);
        }
        local.validate();
        return evaluate(local, spec.reduction, opts.convention);
    }, opts.workers);
    return result;
}

std::vector<double> grid_map(std::size_t n,
                             const std::function<double(std::size_t)>& cell,
                             int workers)
{
    std::vector<double> out(n, 0.0);
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = cell(i);
        }
        return out;
    }
    const std::size_t n_threads = std::min<std::size_t>(workers, n);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t w = 0; w < n_threads; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) {
                    return;
                }
                try {
                    out[i] = cell(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) {
                        first_error = std::current_exception();
                    }
                    return;
                }
            }
        });
    }
    for (std::thread& t : pool) {
        t.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
    return out;
}

} // namespace hybridmem::experiments
