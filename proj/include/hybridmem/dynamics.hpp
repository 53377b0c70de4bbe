#pragma once

#include <functional>
#include <vector>

#include "hybridmem/linalg.hpp"

namespace hybridmem::dynamics {

struct TimeGrid {
    double t_start = 0.0;
    double t_end = 0.0;
    int n_points = 2;      // uniform output grid, >= 2
    double dt_max = 0.0;   // internal substep bound, > 0

    void validate() const;
    double dt_out() const { return (t_end - t_start) / (n_points - 1); }
    double time_at(int k) const { return t_start + k * dt_out(); }
};

// Substep divisors behind default_dt_max: per-substep unitaries are exact
// for constant H, so 200 samples per fastest period only controls the
// midpoint error of ramps; RK4 truncation on the longest density-matrix
// runs needs the tighter 800.
inline constexpr int kUnitaryStepsPerPeriod = 200;
// Ramps need a much denser sampling: the convergence gate asks for < 1e-8
// amplitude change under dt halving, and the midpoint error of a 20-gamma
// sweep only reaches that around 2000 samples per fastest period.
inline constexpr int kRampStepsPerPeriod = 2000;
inline constexpr int kLindbladStepsPerPeriod = 800;

double default_dt_max(double omega_fast, int steps_per_period);

struct Trajectory {
    std::vector<double> times;
    std::vector<ComplexVector> pure_states;      // unitary mode
    std::vector<ComplexMatrix> density_states;   // Lindblad mode
    std::vector<double> norm_or_trace;
    // Filled by callers that know the observables (see experiments).
    std::vector<double> fidelity;
    std::vector<double> pop_c;
    std::vector<double> pop_m;
    std::vector<double> pop_nve;

    bool is_density() const { return !density_states.empty(); }
    std::size_t size() const { return times.size(); }
};

// Exact spectral propagation for constant H: dt_max is irrelevant, every
// output state is exp(-i h t) psi0 to round-off.
Trajectory evolve_pure(const ComplexMatrix& h, const ComplexVector& psi0,
                       const TimeGrid& grid);

// Piecewise-constant propagation for time-dependent H: each substep of
// length <= dt_max applies exp(-i h(t_mid) dt). Norm is preserved exactly
// per substep; the midpoint sampling is second-order in dt for ramps.
Trajectory evolve_pure(const std::function<ComplexMatrix(double)>& h_of_t,
                       const ComplexVector& psi0, const TimeGrid& grid);

// Fixed-step RK4 on drho/dt = -i[H,rho] + sum_j (L rho L^dag - {L^dag L, rho}/2),
// substeps <= dt_max, rho symmetrized each step. Rejects runs whose trace
// drifts beyond 1e-6.
Trajectory evolve_lindblad(const ComplexMatrix& h,
                           const std::vector<ComplexMatrix>& collapse,
                           const ComplexMatrix& rho0, const TimeGrid& grid);

// <psi|O|psi> resp. Tr(rho O) for Hermitian O; the imaginary residue is
// checked below 1e-10 and discarded.
double expectation(const ComplexVector& psi, const ComplexMatrix& op);
double expectation(const ComplexMatrix& rho, const ComplexMatrix& op);

} // namespace hybridmem::dynamics
