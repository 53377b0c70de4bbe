#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "hybridmem/linalg.hpp"
#include "hybridmem/operators.hpp"

namespace hybridmem::model {

// Pinned physical constants (SI). Internally hbar = 1: all SI frequency
// inputs are converted to angular frequencies at the boundary.
namespace constants {
inline constexpr double mu0 = 4e-7 * 3.14159265358979323846;  // T m / A
inline constexpr double mu_bohr = 9.274e-24;                  // J / T
inline constexpr double hbar = 1.0546e-34;                    // J s
inline constexpr double g_e_default = 2.0;
} // namespace constants

struct UnitSystem {
    enum class Mode { DimensionlessGamma, SiAngular };
    Mode mode = Mode::DimensionlessGamma;
    // Reference angular frequency (rad/s) that de-dimensionalizes frequencies
    // and times in DimensionlessGamma mode. Metadata only: internal numbers
    // stay in units of gamma_ref.
    double gamma_ref = 1.0;
};

struct FluxQubitParams {
    double omega = 0.0;       // qubit splitting at the degeneracy point
    double decay_rate = 0.0;  // relaxation rate entering the master equation
};

struct NVEParams {
    double omega_nv = 0.0;
    double g = 0.0;           // collective coupling to qubit M
    double n_spins = 1e6;
    int fock_cutoff = 2;
    // Optional SI anchors. When all are present, omega_nv must reproduce
    // nv_transition_frequency(zero_field_d, g_factor, b_ext_z) to 1e-9 rel.
    std::optional<double> zero_field_d;  // rad/s
    double g_factor = constants::g_e_default;
    std::optional<double> b_ext_z;       // Tesla
};

struct DriveParams {
    double i_ext = 0.0;              // external drive current, A
    double d_c = 0.0;                // drive-to-computing-qubit distance, m
    double d_n = 0.0;                // drive-to-ensemble distance, m
    double loop_side = 0.0;          // computing-qubit loop side L, m
    double persistent_current = 0.0; // I_C, A
    double drive_frequency = 0.0;    // resonant with omega_C by contract
    // Pins Omega_C directly instead of the geometric formula when set.
    std::optional<double> rabi_c_override;
};

enum class RampShape { Linear, Cosine };

struct OmegaRamp {
    double initial = 0.0;  // omega_M(0), detuned
    double target = 0.0;   // omega_M(tau) and beyond
    double tau = 0.0;
    RampShape shape = RampShape::Linear;
};

struct JtSegment {
    double t_from = 0.0;
    double value = 0.0;
};

struct DriveWindow {
    double t_start = 0.0;
    double t_stop = 0.0;
    double omega_c_rabi = 0.0;
    double omega_nv_rabi = 0.0;
};

struct Schedule {
    std::optional<OmegaRamp> omega_m;
    std::vector<JtSegment> j_t;  // piecewise constant, t_from strictly increasing
    std::optional<DriveWindow> drive_window;

    void validate() const;
    double omega_m_at(double t, double fallback) const;
    double j_t_at(double t, double fallback) const;
};

struct SystemConfig {
    UnitSystem unit;
    FluxQubitParams qubit_c;
    FluxQubitParams qubit_m;
    NVEParams nve;
    double j_t = 0.0;  // computing-coupler exchange strength
    std::optional<DriveParams> drive;
    std::optional<Schedule> schedule;
    Complex alpha{1.0, 0.0};  // initial computing-qubit amplitudes
    Complex beta{0.0, 0.0};

    double delta_c() const { return qubit_m.omega - qubit_c.omega; }
    double delta_nv() const { return qubit_m.omega - nve.omega_nv; }
    double mismatch() const { return (j_t - nve.g) / j_t; }
    int dim() const { return 4 * nve.fock_cutoff; }

    // Throws ConfigError on any violated invariant.
    void validate() const;
};

// omega_NV = D - g_e mu_B B_z / hbar. Rejects nonpositive results (the
// two-level reduction no longer applies there).
double nv_transition_frequency(double zero_field_d, double g_e, double b_z_tesla);

// B = mu0 I / (2 pi d)
double field_at_distance(double current, double distance);

// Omega_C = mu0 L^2 I_C I_e / (2 pi hbar d_C)
double rabi_frequency_qubit(const DriveParams& p);

// Omega_NV = sqrt(N) g_e mu_B mu0 I_e / (2 hbar pi d_N)
double rabi_frequency_nve(const DriveParams& p, double n_spins, double g_e);

// rabi_c_override when present, else the geometric formula.
double effective_rabi_c(const DriveParams& p);

// Lambda = (g J_t / 2)(1/Delta_NV + 1/Delta_C); rejects zero detunings.
double effective_lambda(double g, double j_t, double delta_nv, double delta_c);

// Excitation-conserving Hamiltonian on C (x) M (x) NVE with omega_M(t),
// J_t(t) and drive amplitudes read from the schedule when present.
ComplexMatrix build_h_rwa(const SystemConfig& cfg, double t);

// Interaction-picture Hamiltonian at exact tripartite resonance:
// g(b^dag sm_M + b sp_M) + J_t(sm_C sp_M + sp_C sm_M).
ComplexMatrix build_h_resonant(double g, double j_t, int fock_cutoff);

// Coupler-eliminated Hamiltonian on C (x) NVE:
// (D_NV + g^2/D_NV) b^dag b + (D_C + J^2/D_C) n_C + Lambda(sm_C b^dag + sp_C b).
// Valid deep in the dispersive regime; rejected at zero detuning.
ComplexMatrix build_h_dispersive(const SystemConfig& cfg);

// True when min(|Delta_C|, |Delta_NV|) >= 5 max(g, J_t); callers should warn
// before trusting build_h_dispersive below that.
bool dispersive_regime_valid(const SystemConfig& cfg);

// Single-circuit architecture on C (x) NVE: g(b^dag sm_C + b sp_C).
ComplexMatrix build_h_single(double g, int fock_cutoff);

// Flux-basis Hamiltonian at the degeneracy point, counter-rotating terms
// included: (1/2) sum_j omega_j sx_j + omega_NV b^dag b
//           + g sz_M (b^dag + b) + J_t sz_M sz_C.
ComplexMatrix build_h_lab(const SystemConfig& cfg);

// Per-qubit map from the flux basis to the energy eigenbasis at the
// degeneracy point, |ground> = (|0> - |1>)/sqrt(2), embedded on C and M.
// build_h_lab conjugated by this equals build_h_rwa plus the
// counter-rotating terms minus a multiple of the identity.
ComplexMatrix lab_to_eigen_basis(int fock_cutoff);

// Omega_C (sp_C + sm_C) + Omega_NV (b + b^dag) on the full space.
ComplexMatrix build_drive_terms(const DriveParams& p, double n_spins, double g_e,
                                int fock_cutoff);
// Same drive on the reduced C (x) NVE space (single-circuit architecture).
ComplexMatrix build_drive_terms_cn(const DriveParams& p, double n_spins, double g_e,
                                   int fock_cutoff);

// sqrt(gamma_M) sm_M and sqrt(gamma_C) sm_C. The ensemble has no jump
// operator: its decay is far below the flux-qubit rates.
std::vector<ComplexMatrix> collapse_operators(const SystemConfig& cfg);

} // namespace hybridmem::model
