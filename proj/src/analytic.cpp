#include "hybridmem/analytic.hpp"

#include <cmath>
#include <numbers>

#include "hybridmem/errors.hpp"

namespace hybridmem::analytic {

ResonantAmplitudes resonant_amplitudes(double j, double g, double t)
{
    const double omega_sq = j * j + g * g;
    if (omega_sq == 0.0) {
        throw ConfigError("resonant_amplitudes: j and g cannot both be zero");
    }
    const double omega = std::sqrt(omega_sq);
    const double c = std::cos(omega * t);
    const double s = std::sin(omega * t);
    return {
        Complex((g * g + j * j * c) / omega_sq, 0.0),
        Complex(0.0, -j * s / omega),
        Complex(j * g * (c - 1.0) / omega_sq, 0.0),
    };
}

double resonant_transfer_time(double g, int k)
{
    if (!(g > 0.0)) {
        throw ConfigError("resonant_transfer_time: g must be positive");
    }
    if (k < 0) {
        throw ConfigError("resonant_transfer_time: k must be >= 0");
    }
    return (2 * k + 1) * std::numbers::pi / (std::sqrt(2.0) * g);
}

DispersiveAmplitudes dispersive_amplitudes(double lambda_eff, double delta_diag,
                                           double t)
{
    const double w = std::sqrt(lambda_eff * lambda_eff + 0.25 * delta_diag * delta_diag);
    if (w == 0.0) {
        return {Complex(1.0, 0.0), Complex(0.0, 0.0)};
    }
    const double c = std::cos(w * t);
    const double s = std::sin(w * t);
    return {
        Complex(c, -0.5 * delta_diag * s / w),
        Complex(0.0, -lambda_eff * s / w),
    };
}

} // namespace hybridmem::analytic
