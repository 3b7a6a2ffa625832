#include "sbdyn/oracle_models.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "sbdyn/errors.hpp"

namespace sbdyn {

namespace {

void add_thermal_dissipators(SystemSpec& spec, std::size_t mode, const ModeSpec& m) {
    if (m.gamma() == 0.0) {
        return;
    }
    const std::size_t sub = spec.mode_subsystem(mode);
    const double nbar = thermal_occupation(m.beta(), m.omega());
    spec.dissipators.push_back({{{1.0, 0.0, {{sub, LocalOp::Annihilate}}}}, m.gamma() * (nbar + 1.0)});
    if (nbar > 0.0) {
        spec.dissipators.push_back({{{1.0, 0.0, {{sub, LocalOp::Create}}}}, m.gamma() * nbar});
    }
}

// coefficient * spin_factor (x) v^dagger e^{i omega t} + h.c.
void add_coupling(SystemSpec& spec, std::size_t mode, Complex coefficient, double omega,
                  Factor spin_factor) {
    spec.hamiltonian.push_back(
        {{coefficient, omega, {std::move(spin_factor), {spec.mode_subsystem(mode), LocalOp::Create}}},
         true});
}

std::vector<Eigen::Index> cutoffs_for(std::span<const ModeSpec> modes, Eigen::Index n_max) {
    std::vector<Eigen::Index> out;
    for (const auto& m : modes) {
        out.push_back(n_max > 0 ? n_max : auto_cutoff(m));
    }
    return out;
}

std::vector<Eigen::Index> raised(const std::vector<Eigen::Index>& n_max) {
    std::vector<Eigen::Index> out;
    for (auto n : n_max) {
        out.push_back(static_cast<Eigen::Index>(std::ceil(1.5 * static_cast<double>(n))));
    }
    return out;
}

double max_difference(const std::vector<Eigen::MatrixXcd>& a, const std::vector<Eigen::MatrixXcd>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, (a[i] - b[i]).cwiseAbs().maxCoeff());
    }
    return worst;
}

// Runs the oracle at the chosen cutoffs (and the raised ones when gated) and
// pairs it with the analytic states.
Comparison run_comparison(const std::function<SystemSpec(const std::vector<Eigen::Index>&)>& build,
                          const Eigen::MatrixXcd& spin_state, std::span<const ModeSpec> modes,
                          const std::vector<Eigen::Index>& n_max, std::span<const double> times,
                          const ComparisonOptions& options,
                          const std::function<Eigen::MatrixXcd(double)>& analytic) {
    auto oracle_run = [&](const std::vector<Eigen::Index>& cut) {
        const SystemSpec spec = build(cut);
        return integrate_reduced(spec, thermal_product_state(spec, spin_state, modes), times,
                                 options.integration);
    };
    ReducedTrajectory base = oracle_run(n_max);

    Comparison out{{times.begin(), times.end()}, {}, std::move(base.spin_states), 0.0, n_max,
                   -1.0, base.report};
    if (options.truncation_gate) {
        const ReducedTrajectory wide = oracle_run(raised(n_max));
        out.truncation_difference = max_difference(out.oracle, wide.spin_states);
        if (!(out.truncation_difference <= options.gate_tolerance)) {
            std::ostringstream msg;
            msg << "raising the Fock cutoff by 1.5x moved a reduced element by "
                << out.truncation_difference << " (tolerance " << options.gate_tolerance << ")";
            throw TruncationError(msg.str());
        }
    }
    for (double t : times) {
        out.analytic.push_back(analytic(t));
    }
    out.max_deviation = max_difference(out.analytic, out.oracle);
    return out;
}

} // namespace

SystemSpec single_spin_system(int two_j, std::span<const ModeSpec> modes,
                              std::span<const Eigen::Index> n_max) {
    if (modes.empty() || modes.size() != n_max.size()) {
        throw DomainError("single-spin system needs one cutoff per mode and at least one mode");
    }
    SystemSpec spec;
    spec.spin_dims = {two_j + 1};
    spec.mode_truncations.assign(n_max.begin(), n_max.end());
    for (std::size_t k = 0; k < modes.size(); ++k) {
        add_coupling(spec, k, modes[k].eta(), modes[k].omega(), {0, LocalOp::Jz});
        add_thermal_dissipators(spec, k, modes[k]);
    }
    spec.validate();
    return spec;
}

SystemSpec two_spin_system(const TwoSpinParams& params, Eigen::Index n_max) {
    normal_mode_frequencies(params);
    const ModeSpec plus = symmetric_mode(params);
    const ModeSpec minus = antisymmetric_mode(params);
    SystemSpec spec;
    spec.spin_dims = {2, 2};
    spec.mode_truncations = {n_max, n_max};
    const Complex g = plus.eta();
    add_coupling(spec, 0, g, plus.omega(), {0, LocalOp::Jz});
    add_coupling(spec, 0, g, plus.omega(), {1, LocalOp::Jz});
    add_coupling(spec, 1, g, minus.omega(), {0, LocalOp::Jz});
    add_coupling(spec, 1, -g, minus.omega(), {1, LocalOp::Jz});
    add_thermal_dissipators(spec, 0, plus);
    add_thermal_dissipators(spec, 1, minus);
    spec.validate();
    return spec;
}

SystemSpec emitter_system(const EmitterParams& params, std::span<const Eigen::Index> n_max) {
    if (params.modes.empty() || params.modes.size() != n_max.size()) {
        throw DomainError("emitter system needs one cutoff per mode and at least one mode");
    }
    SystemSpec spec;
    spec.spin_dims = {2};
    spec.mode_truncations.assign(n_max.begin(), n_max.end());
    for (std::size_t k = 0; k < params.modes.size(); ++k) {
        const ModeSpec& m = params.modes[k];
        add_coupling(spec, k, m.eta(), m.omega(), {0, LocalOp::Projector, 1});
        add_thermal_dissipators(spec, k, m);
    }
    if (params.gamma_op > 0.0) {
        spec.dissipators.push_back({{{1.0, 0.0, {{0, LocalOp::Lower}}}}, params.gamma_op});
    }
    if (params.gamma_dp > 0.0) {
        spec.dissipators.push_back({{{2.0, 0.0, {{0, LocalOp::Jz}}}}, 0.5 * params.gamma_dp});
    }
    spec.validate();
    return spec;
}

SystemSpec quadrature_system(const ModeSpec& mode, Eigen::Index n_max) {
    SystemSpec spec;
    spec.mode_truncations = {n_max};
    add_thermal_dissipators(spec, 0, mode);
    spec.validate();
    return spec;
}

JointState thermal_product_state(const SystemSpec& spec, const Eigen::MatrixXcd& spin_state,
                                 std::span<const ModeSpec> modes) {
    if (modes.size() != spec.mode_truncations.size()) {
        throw DomainError("one mode description per oracle mode is required");
    }
    if (spin_state.rows() != spec.spin_dimension()) {
        throw DomainError("spin state dimension does not match the system");
    }
    std::vector<Eigen::MatrixXcd> factors{spin_state};
    for (std::size_t k = 0; k < modes.size(); ++k) {
        factors.push_back(
            build_thermal_state(spec.mode_truncations[k], modes[k].beta(), modes[k].omega()));
    }
    return JointState::product(factors);
}

Comparison compare_single_spin(const SpinDensityMatrix& rho0, std::span<const ModeSpec> modes,
                               std::span<const double> times, const ComparisonOptions& options) {
    const int two_j = rho0.two_j();
    return run_comparison(
        [&](const std::vector<Eigen::Index>& cut) { return single_spin_system(two_j, modes, cut); },
        rho0.elements(), modes, cutoffs_for(modes, options.n_max), times, options,
        [&](double t) { return evolve_spin(rho0, modes, t).elements(); });
}

Comparison compare_two_spin(const TwoSpinDensityMatrix& rho0, const TwoSpinParams& params,
                            std::span<const double> times, const ComparisonOptions& options) {
    const std::vector<ModeSpec> modes{symmetric_mode(params), antisymmetric_mode(params)};
    std::vector<Eigen::Index> cut = cutoffs_for(modes, options.n_max);
    const Eigen::Index common = *std::max_element(cut.begin(), cut.end());
    cut.assign(2, common);
    return run_comparison(
        [&](const std::vector<Eigen::Index>& c) { return two_spin_system(params, c.front()); },
        rho0.elements(), modes, cut, times, options,
        [&](double t) { return Eigen::MatrixXcd(evolve_two_spins(rho0, params, t).elements()); });
}

Comparison compare_emitter(const EmitterState& rho0, const EmitterParams& params,
                           std::span<const double> times, const ComparisonOptions& options) {
    return run_comparison(
        [&](const std::vector<Eigen::Index>& cut) { return emitter_system(params, cut); }, rho0,
        params.modes, cutoffs_for(params.modes, options.n_max), times, options,
        [&](double t) { return Eigen::MatrixXcd(evolve_emitter(rho0, params, t)); });
}

} // namespace sbdyn
