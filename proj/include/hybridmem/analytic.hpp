#pragma once

#include <complex>

namespace hybridmem::analytic {

using Complex = std::complex<double>;

// Closed-form amplitudes on the single-excitation chain
// {computing excited, coupler excited, ensemble excited} starting from the
// first, with Omega = sqrt(j^2 + g^2):
//   c1 = (g^2 + j^2 cos Omega t)/Omega^2
//   c2 = -i j sin(Omega t)/Omega
//   c3 = j g (cos Omega t - 1)/Omega^2
// The constant g^2/Omega^2 term in c1 is required by c1(0) = 1; it is the
// unique solution of the chain Schroedinger equation with that start.
struct ResonantAmplitudes {
    Complex c1;
    Complex c2;
    Complex c3;
};

ResonantAmplitudes resonant_amplitudes(double j, double g, double t);

// t = (2k+1) pi / (sqrt(2) g), the k-th full-transfer time at j = g.
double resonant_transfer_time(double g, int k = 0);

// Generalized two-level Rabi solution in the single-excitation subspace of
// the coupler-eliminated system, diagonal splitting delta_diag between the
// qubit-excited and mode-excited levels:
//   c_qubit = cos(W t) - i (delta/2W) sin(W t),  W = sqrt(lambda^2 + delta^2/4)
//   c_mode  = -i (lambda/W) sin(W t)
struct DispersiveAmplitudes {
    Complex c_qubit;
    Complex c_mode;
};

DispersiveAmplitudes dispersive_amplitudes(double lambda_eff, double delta_diag,
                                           double t);

} // namespace hybridmem::analytic
