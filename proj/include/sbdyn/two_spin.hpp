// two_spin.hpp — Two spin-1/2 particles dephased by coupled local modes that decay
// as symmetric/antisymmetric normal modes

#pragma once

#include <Eigen/Dense>

#include "sbdyn/density.hpp"
#include "sbdyn/spectral.hpp"

namespace sbdyn {

/// Parameters of two spins, each coupled (strength eta) to a local mode of bare
/// frequency omega0, with inter-mode hopping kappa. The normal modes decay at
/// gamma_plus (symmetric) and gamma_minus (antisymmetric) into baths sharing beta.
struct TwoSpinParams {
    double omega0{1.0};
    double kappa{0.0};
    double eta{1.0};
    double gamma_plus{0.0};
    double gamma_minus{0.0};
    InverseTemperature beta{InverseTemperature::zero_temperature()};
};

struct NormalModeFrequencies {
    double omega_plus;
    double omega_minus;
};

struct NormalModeRates {
    double gamma_plus;
    double gamma_minus;
};

/// omega_pm = omega0 +- 2 kappa. Throws DomainError if either is <= 0.
NormalModeFrequencies normal_mode_frequencies(const TwoSpinParams& params);

/// Debye scaling of one normal mode: gamma0 (mode_frequency / omega0)^3.
double debye_rate(double gamma0, double omega0, double mode_frequency);

/// gamma_pm = gamma0 ((omega0 +- 2 kappa) / omega0)^3.
NormalModeRates debye_rates(double gamma0, double omega0, double kappa);

/// Normal modes as seen by the spins. Each carries the effective coupling
/// eta / sqrt(2) of the position quadrature (v + v^dagger)/sqrt(2).
ModeSpec symmetric_mode(const TwoSpinParams& params);
ModeSpec antisymmetric_mode(const TwoSpinParams& params);

/// Two-spin state in the local product basis |m1, m2>, index 2 k1 + k2 with
/// k = m + 1/2, i.e. ordering {|dd>, |du>, |ud>, |uu>}.
class TwoSpinDensityMatrix {
public:
    explicit TwoSpinDensityMatrix(const Eigen::Matrix4cd& elements);

    const Eigen::Matrix4cd& elements() const noexcept { return elements_; }
    Complex operator()(Eigen::Index r, Eigen::Index c) const { return elements_(r, c); }

    static double m1_of(Eigen::Index index) noexcept { return (index / 2) - 0.5; }
    static double m2_of(Eigen::Index index) noexcept { return (index % 2) - 0.5; }

private:
    Eigen::Matrix4cd elements_;
};

/// Coupled basis ordering used by local_to_coupled.
enum class CoupledState : Eigen::Index { Triplet_p1 = 0, Triplet_0 = 1, Triplet_m1 = 2, Singlet = 3 };

/// Rows are <J,M| expressed in the local basis.
const Eigen::Matrix4cd& coupled_basis();

/// Change of basis local -> {|1,1>, |1,0>, |1,-1>, |0,0>}; works for any operator.
Eigen::Matrix4cd local_to_coupled(const Eigen::Matrix4cd& op);
Eigen::Matrix4cd local_to_coupled(const TwoSpinDensityMatrix& rho);
Eigen::Matrix4cd coupled_to_local(const Eigen::Matrix4cd& op);

/// Projector |J,M><J,M| in the local basis.
Eigen::Matrix4cd coupled_projector(CoupledState state);

/// Exact reduced state at time t. Each normal mode acts as the single-spin map
/// on its collective eigenvalue: m1 + m2 for the symmetric mode, m1 - m2 for
/// the antisymmetric one.
TwoSpinDensityMatrix evolve_two_spins(const TwoSpinDensityMatrix& rho0,
                                      const TwoSpinParams& params, double t);

struct ProjectorPopulation {
    double p_keep;
    double p_leak;
};

/// Fraction of |1,0> population retained (and moved to |0,0>) at time t.
/// Depends on the antisymmetric mode only, so only omega_minus > 0 is required.
ProjectorPopulation symmetric_projector_population(const TwoSpinParams& params, double t);

/// Tr[P_sym(t) P_sym(0)] = 2 + p_keep. Independent of gamma_plus.
double symmetric_overlap(const TwoSpinParams& params, double t);

} // namespace sbdyn
