#include "hybridmem/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hybridmem/errors.hpp"

namespace hybridmem::dynamics {

namespace {

void check_normalized(const ComplexVector& psi0)
{
    linalg::require_finite(psi0, "psi0");
    const double norm = psi0.norm();
    if (std::abs(norm - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "initial state not normalized: |psi0| = " << norm;
        throw ConfigError(msg.str());
    }
}

void check_density(const ComplexMatrix& rho0)
{
    linalg::require_finite(rho0, "rho0");
    if (rho0.rows() != rho0.cols()) {
        throw ConfigError("rho0 must be square");
    }
    if (linalg::hermiticity_defect(rho0) > 1e-10) {
        throw ConfigError("rho0 not Hermitian");
    }
    if (std::abs(rho0.trace().real() - 1.0) > 1e-9 || std::abs(rho0.trace().imag()) > 1e-12) {
        throw ConfigError("rho0 trace must be 1");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho0, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
        std::ostringstream msg;
        msg << "rho0 not positive semidefinite, min eigenvalue " << es.eigenvalues().minCoeff();
        throw ConfigError(msg.str());
    }
}

} // namespace

void TimeGrid::validate() const
{
    if (!(t_end > t_start)) {
        throw ConfigError("time grid: t_end must exceed t_start");
    }
    if (n_points < 2) {
        throw ConfigError("time grid: n_points must be >= 2");
    }
    if (!(dt_max > 0.0)) {
        throw ConfigError("time grid: dt_max must be positive");
    }
}

double default_dt_max(double omega_fast, int steps_per_period)
{
    const double floor_scale = std::max(omega_fast, 1e-12);
    return 2.0 * std::numbers::pi / (steps_per_period * floor_scale);
}

Trajectory evolve_pure(const ComplexMatrix& h, const ComplexVector& psi0,
                       const TimeGrid& grid)
{
    grid.validate();
    check_normalized(psi0);
    if (h.rows() != psi0.size()) {
        throw ConfigError("evolve_pure: dimension mismatch between H and psi0");
    }
    const linalg::Eigensystem es = linalg::eig_hermitian(h);
    const ComplexVector c0 = es.vectors.adjoint() * psi0;

    Trajectory out;
    out.times.reserve(grid.n_points);
    out.pure_states.reserve(grid.n_points);
    out.norm_or_trace.reserve(grid.n_points);
    ComplexVector phased(c0.size());
    for (int k = 0; k < grid.n_points; ++k) {
        const double t = grid.time_at(k) - grid.t_start;
        for (Eigen::Index j = 0; j < c0.size(); ++j) {
            phased(j) = std::exp(Complex(0.0, -es.values(j) * t)) * c0(j);
        }
        out.times.push_back(grid.time_at(k));
        out.pure_states.emplace_back(es.vectors * phased);
        out.norm_or_trace.push_back(out.pure_states.back().norm());
    }
    return out;
}

Trajectory evolve_pure(const std::function<ComplexMatrix(double)>& h_of_t,
                       const ComplexVector& psi0, const TimeGrid& grid)
{
    grid.validate();
    check_normalized(psi0);

    Trajectory out;
    out.times.reserve(grid.n_points);
    out.pure_states.reserve(grid.n_points);
    out.norm_or_trace.reserve(grid.n_points);
    out.times.push_back(grid.t_start);
    out.pure_states.push_back(psi0);
    out.norm_or_trace.push_back(psi0.norm());

    ComplexVector psi = psi0;
    const double dt_out = grid.dt_out();
    const int substeps = std::max(1, static_cast<int>(std::ceil(dt_out / grid.dt_max)));
    const double dt = dt_out / substeps;
    for (int k = 1; k < grid.n_points; ++k) {
        const double t0 = grid.time_at(k - 1);
        for (int s = 0; s < substeps; ++s) {
            const ComplexMatrix h = h_of_t(t0 + (s + 0.5) * dt);
            if (h.rows() != psi.size()) {
                throw ConfigError("evolve_pure: dimension mismatch between H(t) and state");
            }
            psi = linalg::unitary_from_hamiltonian(h, dt) * psi;
        }
        out.times.push_back(grid.time_at(k));
        out.pure_states.push_back(psi);
        out.norm_or_trace.push_back(psi.norm());
    }
    return out;
}

Trajectory evolve_lindblad(const ComplexMatrix& h,
                           const std::vector<ComplexMatrix>& collapse,
                           const ComplexMatrix& rho0, const TimeGrid& grid)
{
    grid.validate();
    check_density(rho0);
    if (h.rows() != rho0.rows()) {
        throw ConfigError("evolve_lindblad: dimension mismatch between H and rho0");
    }
    if (linalg::hermiticity_defect(h) > linalg::kHermitianTol) {
        throw NumericalError("evolve_lindblad: Hamiltonian not Hermitian");
    }
    for (const ComplexMatrix& l : collapse) {
        if (l.rows() != rho0.rows() || l.cols() != rho0.cols()) {
            throw ConfigError("evolve_lindblad: collapse operator dimension mismatch");
        }
    }

    const Eigen::Index n = rho0.rows();
    ComplexMatrix anticomm_sum = ComplexMatrix::Zero(n, n);  // sum_j L^dag L
    std::vector<ComplexMatrix> l_dag(collapse.size());
    for (std::size_t j = 0; j < collapse.size(); ++j) {
        l_dag[j] = collapse[j].adjoint();
        anticomm_sum += l_dag[j] * collapse[j];
    }

    ComplexMatrix tmp(n, n);
    auto rhs = [&](const ComplexMatrix& rho, ComplexMatrix& out) {
        out.noalias() = Complex(0.0, -1.0) * (h * rho);
        out.noalias() += Complex(0.0, 1.0) * (rho * h);
        for (std::size_t j = 0; j < collapse.size(); ++j) {
            tmp.noalias() = collapse[j] * rho;
            out.noalias() += tmp * l_dag[j];
        }
        out.noalias() -= 0.5 * (anticomm_sum * rho);
        out.noalias() -= 0.5 * (rho * anticomm_sum);
    };

    Trajectory out;
    out.times.reserve(grid.n_points);
    out.density_states.reserve(grid.n_points);
    out.norm_or_trace.reserve(grid.n_points);
    out.times.push_back(grid.t_start);
    out.density_states.push_back(rho0);
    out.norm_or_trace.push_back(rho0.trace().real());

    ComplexMatrix rho = rho0;
    ComplexMatrix k1(n, n), k2(n, n), k3(n, n), k4(n, n), stage(n, n);
    const double dt_out = grid.dt_out();
    const int substeps = std::max(1, static_cast<int>(std::ceil(dt_out / grid.dt_max)));
    const double dt = dt_out / substeps;
    for (int k = 1; k < grid.n_points; ++k) {
        for (int s = 0; s < substeps; ++s) {
            rhs(rho, k1);
            stage = rho + (0.5 * dt) * k1;
            rhs(stage, k2);
            stage = rho + (0.5 * dt) * k2;
            rhs(stage, k3);
            stage = rho + dt * k3;
            rhs(stage, k4);
            rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            rho = 0.5 * (rho + rho.adjoint()).eval();
        }
        const double trace = rho.trace().real();
        const double magnitude = rho.cwiseAbs().maxCoeff();
        if (!(std::abs(trace - 1.0) <= 1e-6) || !(magnitude <= 10.0)) {
            std::ostringstream msg;
            msg << "evolve_lindblad: state diverged (trace " << trace
                << ", max entry " << magnitude << "); reduce dt_max";
            throw NumericalError(msg.str());
        }
        out.times.push_back(grid.time_at(k));
        out.density_states.push_back(rho);
        out.norm_or_trace.push_back(trace);
    }
    return out;
}

namespace {

double check_real(Complex value, const char* what)
{
    if (std::abs(value.imag()) > 1e-10) {
        std::ostringstream msg;
        msg << what << ": imaginary residue " << value.imag()
            << " exceeds 1e-10 (operator not Hermitian?)";
        throw NumericalError(msg.str());
    }
    return value.real();
}

} // namespace

double expectation(const ComplexVector& psi, const ComplexMatrix& op)
{
    if (op.rows() != psi.size() || op.cols() != psi.size()) {
        throw ConfigError("expectation: dimension mismatch");
    }
    return check_real(psi.dot(op * psi), "expectation");
}

double expectation(const ComplexMatrix& rho, const ComplexMatrix& op)
{
    if (op.rows() != rho.rows() || op.cols() != rho.cols()) {
        throw ConfigError("expectation: dimension mismatch");
    }
    return check_real((rho * op).trace(), "expectation");
}

} // namespace hybridmem::dynamics
