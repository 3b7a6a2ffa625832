// emitter.hpp — Two-level emitter with vibronic dephasing plus optical decay and pure dephasing

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sbdyn/density.hpp"
#include "sbdyn/spectral.hpp"

namespace sbdyn {

/// Vibrational modes couple to the excited-state projector |e><e|.
struct EmitterParams {
    std::vector<ModeSpec> modes;
    double gamma_op{0.0};
    double gamma_dp{0.0};
};

/// Emitter state in the basis {|g>, |e>} (index 0 = ground).
using EmitterState = Eigen::Matrix2cd;

/// Projector eigenvalues of the basis states: 0 for |g>, 1 for |e>.
inline constexpr double kEmitterLabels[2] = {0.0, 1.0};

/// Exact reduced emitter state at time t. Throws DomainError for an invalid
/// state, negative rates, an empty mode list or t < 0.
EmitterState evolve_emitter(const EmitterState& rho0, const EmitterParams& params, double t);

} // namespace sbdyn
