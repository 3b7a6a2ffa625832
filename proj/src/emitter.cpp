#include "sbdyn/emitter.hpp"

#include <cmath>

#include "sbdyn/errors.hpp"
#include "sbdyn/spin_map.hpp"

namespace sbdyn {

EmitterState evolve_emitter(const EmitterState& rho0, const EmitterParams& params, double t) {
    if (!(params.gamma_op >= 0.0) || !(params.gamma_dp >= 0.0) ||
        !std::isfinite(params.gamma_op) || !std::isfinite(params.gamma_dp)) {
        throw DomainError("emitter rates must be finite and >= 0");
    }
    check_density_matrix(rho0, {}, "emitter state");
    const DephasingFactors factors = accumulate_factors(params.modes, t);

    EmitterState out = dephase_elements(rho0, kEmitterLabels, factors);
    const double ee0 = rho0(1, 1).real();
    // gg0 + ee0 (1 - e^{-gamma_op t}), so the decay-free case leaves gg untouched.
    out(0, 0) = rho0(0, 0) - ee0 * std::expm1(-params.gamma_op * t);
    out(1, 1) = rho0(1, 1) * std::exp(-params.gamma_op * t);
    const double coherence_decay = std::exp(-(params.gamma_dp + 0.5 * params.gamma_op) * t);
    out(0, 1) *= coherence_decay;
    out(1, 0) *= coherence_decay;
    return out;
}

} // namespace sbdyn
