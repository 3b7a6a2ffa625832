#include "sbdyn/two_spin.hpp"

#include <cmath>
#include <string>

#include "sbdyn/errors.hpp"

namespace sbdyn {

namespace {

void require_finite_params(const TwoSpinParams& p) {
    if (!(p.omega0 > 0.0) || !std::isfinite(p.omega0)) {
        throw DomainError("two-spin omega0 must be finite and > 0");
    }
    if (!std::isfinite(p.kappa) || !std::isfinite(p.eta)) {
        throw DomainError("two-spin kappa and eta must be finite");
    }
}

double checked_frequency(double w, const char* which) {
    if (!(w > 0.0)) {
        throw DomainError(std::string(which) + " normal-mode frequency must be > 0, got " +
                          std::to_string(w));
    }
    return w;
}

double omega_minus_of(const TwoSpinParams& p) {
    require_finite_params(p);
    return checked_frequency(p.omega0 - 2.0 * p.kappa, "antisymmetric");
}

double omega_plus_of(const TwoSpinParams& p) {
    require_finite_params(p);
    return checked_frequency(p.omega0 + 2.0 * p.kappa, "symmetric");
}

} // namespace

NormalModeFrequencies normal_mode_frequencies(const TwoSpinParams& params) {
    return {omega_plus_of(params), omega_minus_of(params)};
}

double debye_rate(double gamma0, double omega0, double mode_frequency) {
    if (!(gamma0 >= 0.0) || !(omega0 > 0.0)) {
        throw DomainError("Debye scaling needs gamma0 >= 0 and omega0 > 0");
    }
    checked_frequency(mode_frequency, "Debye-scaled");
    const double ratio = mode_frequency / omega0;
    return gamma0 * ratio * ratio * ratio;
}

NormalModeRates debye_rates(double gamma0, double omega0, double kappa) {
    return {debye_rate(gamma0, omega0, omega0 + 2.0 * kappa),
            debye_rate(gamma0, omega0, omega0 - 2.0 * kappa)};
}

ModeSpec symmetric_mode(const TwoSpinParams& params) {
    return {omega_plus_of(params), params.eta / std::sqrt(2.0), params.gamma_plus, params.beta};
}

ModeSpec antisymmetric_mode(const TwoSpinParams& params) {
    return {omega_minus_of(params), params.eta / std::sqrt(2.0), params.gamma_minus, params.beta};
}

TwoSpinDensityMatrix::TwoSpinDensityMatrix(const Eigen::Matrix4cd& elements)
    : elements_(elements) {
    check_density_matrix(elements_, {}, "two-spin state");
}

const Eigen::Matrix4cd& coupled_basis() {
    static const Eigen::Matrix4cd basis = [] {
        const double s = 1.0 / std::sqrt(2.0);
        Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
        u(0, 3) = 1.0;            // |1,1>  = |uu>
        u(1, 1) = s;              // |1,0>  = (|ud> + |du>)/sqrt2
        u(1, 2) = s;
        u(2, 0) = 1.0;            // |1,-1> = |dd>
        u(3, 1) = -s;             // |0,0>  = (|ud> - |du>)/sqrt2
        u(3, 2) = s;
        return u;
    }();
    return basis;
}

Eigen::Matrix4cd local_to_coupled(const Eigen::Matrix4cd& op) {
    const auto& u = coupled_basis();
    return u * op * u.adjoint();
}

Eigen::Matrix4cd local_to_coupled(const TwoSpinDensityMatrix& rho) {
    return local_to_coupled(rho.elements());
}

Eigen::Matrix4cd coupled_to_local(const Eigen::Matrix4cd& op) {
    const auto& u = coupled_basis();
    return u.adjoint() * op * u;
}

Eigen::Matrix4cd coupled_projector(CoupledState state) {
    Eigen::Matrix4cd p = Eigen::Matrix4cd::Zero();
    const auto i = static_cast<Eigen::Index>(state);
    p(i, i) = 1.0;
    return coupled_to_local(p);
}

TwoSpinDensityMatrix evolve_two_spins(const TwoSpinDensityMatrix& rho0,
                                      const TwoSpinParams& params, double t) {
    const DephasingFactors sym = dephasing_integrals_closed(symmetric_mode(params), t);
    const DephasingFactors anti = dephasing_integrals_closed(antisymmetric_mode(params), t);

    Eigen::Matrix4cd out = rho0.elements();
    for (Eigen::Index r = 0; r < 4; ++r) {
        const double m1 = TwoSpinDensityMatrix::m1_of(r);
        const double m2 = TwoSpinDensityMatrix::m2_of(r);
        for (Eigen::Index c = 0; c < 4; ++c) {
            if (r == c) {
                continue;
            }
            const double n1 = TwoSpinDensityMatrix::m1_of(c);
            const double n2 = TwoSpinDensityMatrix::m2_of(c);
            // Collective eigenvalues seen by each normal mode.
            const double s = m1 + m2;
            const double sp = n1 + n2;
            const double a = m1 - m2;
            const double ap = n1 - n2;
            const double phase_sym = s * s - sp * sp;
            const double phase_anti = a * a - ap * ap;
            const double d_sym = s - sp;
            const double d_anti = a - ap;
            const double decay = d_sym * d_sym * sym.i_re + d_anti * d_anti * anti.i_re;
            const double phase = phase_sym * sym.i_im + phase_anti * anti.i_im;
            out(r, c) *= std::exp(Complex(-decay, -phase));
        }
    }
    return TwoSpinDensityMatrix(out);
}

ProjectorPopulation symmetric_projector_population(const TwoSpinParams& params, double t) {
    const DephasingFactors anti = dephasing_integrals_closed(antisymmetric_mode(params), t);
    const double keep = 0.5 * (1.0 + std::exp(-4.0 * anti.i_re));
    return {keep, 1.0 - keep};
}

double symmetric_overlap(const TwoSpinParams& params, double t) {
    return 2.0 + symmetric_projector_population(params, t).p_keep;
}

} // namespace sbdyn
