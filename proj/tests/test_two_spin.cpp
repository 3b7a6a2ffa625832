#include <cmath>
#include <random>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include <gtest/gtest.h>

#include "sbdyn/density.hpp"
#include "sbdyn/errors.hpp"
#include "sbdyn/oracle_models.hpp"
#include "sbdyn/spin_map.hpp"
#include "sbdyn/two_spin.hpp"
#include "test_support.hpp"

using namespace sbdyn;
using sbdyn::test::max_abs_diff;
using sbdyn::test::random_density;

namespace {

const InverseTemperature kZeroT = InverseTemperature::zero_temperature();

TwoSpinParams params(double kappa, double gamma_plus, double gamma_minus, double eta = 1.0,
                     InverseTemperature beta = kZeroT) {
    TwoSpinParams p;
    p.omega0 = 1.0;
    p.kappa = kappa;
    p.eta = eta;
    p.gamma_plus = gamma_plus;
    p.gamma_minus = gamma_minus;
    p.beta = beta;
    return p;
}

TwoSpinDensityMatrix random_two_spin(std::mt19937_64& rng) {
    return TwoSpinDensityMatrix(Eigen::Matrix4cd(random_density(4, rng)));
}

Eigen::Matrix4cd product_x() {
    return Eigen::Matrix4cd::Constant(Complex(0.25, 0.0));
}

} // namespace

TEST(NormalModes, Frequencies) {
    const auto degenerate = normal_mode_frequencies(params(0.0, 0.0, 0.0));
    EXPECT_EQ(degenerate.omega_plus, 1.0);
    EXPECT_EQ(degenerate.omega_minus, 1.0);
    const auto split = normal_mode_frequencies(params(-0.2, 0.0, 0.0));
    EXPECT_NEAR(split.omega_plus, 0.6, 1e-15);
    EXPECT_NEAR(split.omega_minus, 1.4, 1e-15);
    EXPECT_THROW(normal_mode_frequencies(params(0.5, 0.0, 0.0)), DomainError);
    EXPECT_THROW(normal_mode_frequencies(params(-0.6, 0.0, 0.0)), DomainError);
}

TEST(NormalModes, EffectiveCoupling) {
    const auto p = params(0.1, 0.5, 2.0, 1.2);
    EXPECT_NEAR(std::abs(symmetric_mode(p).eta()), 1.2 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(std::abs(antisymmetric_mode(p).eta()), 1.2 / std::sqrt(2.0), 1e-15);
    EXPECT_EQ(symmetric_mode(p).gamma(), 0.5);
    EXPECT_EQ(antisymmetric_mode(p).gamma(), 2.0);
}

TEST(DebyeRates, Examples) {
    const auto flat = debye_rates(1.0, 1.0, 0.0);
    EXPECT_EQ(flat.gamma_plus, 1.0);
    EXPECT_EQ(flat.gamma_minus, 1.0);
    const auto a = debye_rates(1.0, 1.0, -0.2);
    EXPECT_NEAR(a.gamma_plus, 0.216, 1e-14);
    EXPECT_NEAR(a.gamma_minus, 2.744, 1e-14);
    const auto b = debye_rates(1.0, 1.0, -0.4);
    EXPECT_NEAR(b.gamma_plus, 0.008, 1e-14);
    EXPECT_NEAR(b.gamma_minus, 5.832, 1e-14);
    EXPECT_THROW(debye_rates(1.0, 1.0, -0.6), DomainError);
    EXPECT_THROW(debye_rates(-1.0, 1.0, 0.0), DomainError);
    EXPECT_NEAR(debye_rate(1.0, 1.0, 2.2), 10.648, 1e-12);
}

TEST(CoupledBasis, Examples) {
    Eigen::Matrix4cd uu = Eigen::Matrix4cd::Zero();
    uu(3, 3) = 1.0;
    const auto c = local_to_coupled(uu);
    EXPECT_NEAR(std::abs(c(0, 0) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(c.cwiseAbs().sum(), 1.0, 1e-15);

    Eigen::Matrix4cd ud = Eigen::Matrix4cd::Zero();
    ud(2, 2) = 1.0;
    const auto d = local_to_coupled(ud);
    EXPECT_NEAR(d(1, 1).real(), 0.5, 1e-15);
    EXPECT_NEAR(d(3, 3).real(), 0.5, 1e-15);
    EXPECT_NEAR(std::abs(d(1, 3)), 0.5, 1e-15);

    const Eigen::Matrix4cd& u = coupled_basis();
    EXPECT_LT(max_abs_diff(u * u.adjoint(), Eigen::Matrix4cd::Identity()), 1e-15);
    // Exchange symmetry: the triplet is even, the singlet odd under swapping spins.
    Eigen::Matrix4cd swap = Eigen::Matrix4cd::Zero();
    swap(0, 0) = swap(3, 3) = 1.0;
    swap(1, 2) = swap(2, 1) = 1.0;
    const Eigen::Matrix4cd swap_c = local_to_coupled(swap);
    EXPECT_LT(max_abs_diff(swap_c, Eigen::Vector4cd(1.0, 1.0, 1.0, -1.0).asDiagonal().toDenseMatrix()),
              1e-15);
}

TEST(CoupledBasis, RoundTripOnRandomStates) {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 100; ++i) {
        const auto rho = random_two_spin(rng);
        EXPECT_LT(max_abs_diff(coupled_to_local(local_to_coupled(rho)), rho.elements()), 1e-14);
    }
}

TEST(CoupledBasis, ProjectorsResolveIdentity) {
    Eigen::Matrix4cd sum = Eigen::Matrix4cd::Zero();
    for (auto s : {CoupledState::Triplet_p1, CoupledState::Triplet_0, CoupledState::Triplet_m1,
                   CoupledState::Singlet}) {
        const auto p = coupled_projector(s);
        EXPECT_LT(max_abs_diff(p * p, p), 1e-15);
        sum += p;
    }
    EXPECT_LT(max_abs_diff(sum, Eigen::Matrix4cd::Identity()), 1e-15);
}

TEST(EvolveTwoSpins, DiagonalStatesUnchanged) {
    std::mt19937_64 rng(2);
    Eigen::Matrix4cd rho = random_density(4, rng);
    rho = Eigen::Matrix4cd(rho.diagonal().asDiagonal());
    const TwoSpinDensityMatrix rho0(rho);
    for (double t : {0.0, 1.0, 8.0}) {
        EXPECT_EQ(evolve_two_spins(rho0, params(-0.2, 0.3, 4.0), t).elements(), rho);
    }
}

TEST(EvolveTwoSpins, FactorisesIntoLocalMapsWithoutHopping) {
    std::mt19937_64 rng(23);
    const double gamma = 0.7;
    const auto p = params(0.0, gamma, gamma, 1.3, InverseTemperature::finite(1.5));
    const std::vector<ModeSpec> local{ModeSpec(1.0, 1.3, gamma, InverseTemperature::finite(1.5))};
    for (int i = 0; i < 10; ++i) {
        const SpinDensityMatrix a(1, random_density(2, rng));
        const SpinDensityMatrix b(1, random_density(2, rng));
        const Eigen::Matrix4cd product = Eigen::kroneckerProduct(a.elements(), b.elements());
        const TwoSpinDensityMatrix rho0(product);
        for (double t : {0.4, 2.0, 6.5}) {
            const Eigen::Matrix4cd expected = Eigen::kroneckerProduct(
                evolve_spin(a, local, t).elements(), evolve_spin(b, local, t).elements());
            EXPECT_LT(max_abs_diff(evolve_two_spins(rho0, p, t).elements(), expected), 1e-10);
        }
    }
}

TEST(EvolveTwoSpins, FactorisesOnEntangledStates) {
    // The elementwise factor of two independent local maps, written out.
    std::mt19937_64 rng(29);
    const double gamma = 0.4;
    const auto p = params(0.0, gamma, gamma, 0.9);
    const ModeSpec local(1.0, 0.9, gamma, kZeroT);
    const auto rho0 = random_two_spin(rng);
    const double t = 3.3;
    const auto f = dephasing_integrals_closed(local, t);
    const auto out = evolve_two_spins(rho0, p, t);
    for (Eigen::Index r = 0; r < 4; ++r) {
        for (Eigen::Index c = 0; c < 4; ++c) {
            const double d1 = TwoSpinDensityMatrix::m1_of(r) - TwoSpinDensityMatrix::m1_of(c);
            const double d2 = TwoSpinDensityMatrix::m2_of(r) - TwoSpinDensityMatrix::m2_of(c);
            const Complex expected = rho0(r, c) * std::exp(-(d1 * d1 + d2 * d2) * f.i_re);
            EXPECT_NEAR(std::abs(out(r, c) - expected), 0.0, 1e-12);
        }
    }
}

TEST(EvolveTwoSpins, PreservesStateInvariants) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const auto rho0 = random_two_spin(rng);
        const auto p = params(-0.45 + 0.9 * u(rng), 5.0 * u(rng), 5.0 * u(rng), 2.0 * u(rng),
                              u(rng) < 0.5 ? kZeroT : InverseTemperature::finite(0.3 + u(rng)));
        const auto out = evolve_two_spins(rho0, p, 15.0 * u(rng));
        EXPECT_NO_THROW(check_density_matrix(out.elements(), {}, "evolved two-spin state"));
    }
}

TEST(EvolveTwoSpins, OuterTripletProjectorsAreStationary) {
    std::mt19937_64 rng(37);
    const auto p_up = coupled_projector(CoupledState::Triplet_p1);
    const auto p_down = coupled_projector(CoupledState::Triplet_m1);
    for (int i = 0; i < 20; ++i) {
        const auto rho0 = random_two_spin(rng);
        const auto p = params(-0.3, 1.0 + i, 0.5 * i, 1.0);
        for (double t : {0.5, 4.0, 12.0}) {
            const auto rho = evolve_two_spins(rho0, p, t).elements();
            EXPECT_NEAR((p_up * rho).trace().real(), (p_up * rho0.elements()).trace().real(), 1e-14);
            EXPECT_NEAR((p_down * rho).trace().real(), (p_down * rho0.elements()).trace().real(),
                        1e-14);
        }
    }
}

TEST(ProjectorPopulation, Limits) {
    const auto p = params(0.0, 1.0, 5.0);
    const auto start = symmetric_projector_population(p, 0.0);
    EXPECT_EQ(start.p_keep, 1.0);
    EXPECT_EQ(start.p_leak, 0.0);
    const auto late = symmetric_projector_population(p, 500.0);
    EXPECT_NEAR(late.p_keep, 0.5, 1e-12);
    EXPECT_NEAR(late.p_leak, 0.5, 1e-12);
}

TEST(ProjectorPopulation, MatchesFullMapOnRandomParameters) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const TwoSpinDensityMatrix triplet0(coupled_projector(CoupledState::Triplet_0));
    const auto p10 = coupled_projector(CoupledState::Triplet_0);
    const auto p00 = coupled_projector(CoupledState::Singlet);
    for (int i = 0; i < 50; ++i) {
        const auto p = params(-0.45 + 0.9 * u(rng), 10.0 * u(rng), 10.0 * u(rng), 2.0 * u(rng),
                              InverseTemperature::finite(0.2 + 5.0 * u(rng)));
        const double t = 10.0 * u(rng);
        const auto rho = evolve_two_spins(triplet0, p, t).elements();
        const auto pop = symmetric_projector_population(p, t);
        EXPECT_NEAR((p10 * rho).trace().real(), pop.p_keep, 1e-12);
        EXPECT_NEAR((p00 * rho).trace().real(), pop.p_leak, 1e-12);
    }
}

TEST(ProjectorPopulation, OnlyNeedsPositiveAntisymmetricFrequency) {
    const auto p = params(-0.6, 0.0, 1.0);
    EXPECT_NO_THROW(symmetric_projector_population(p, 2.0));
    EXPECT_THROW(evolve_two_spins(TwoSpinDensityMatrix(product_x()), p, 2.0), DomainError);
    EXPECT_THROW(symmetric_projector_population(params(0.5, 0.0, 1.0), 2.0), DomainError);
}

TEST(ProjectorPopulation, ZenoOrderingInAntisymmetricRate) {
    double previous = 0.0;
    for (double gm : {1.0, 5.0, 10.0, 50.0}) {
        auto p = params(0.0, 0.0, gm, 1.0, InverseTemperature::finite(1e20));
        const double keep = symmetric_projector_population(p, 5.0).p_keep;
        EXPECT_GT(keep, previous) << "gamma_minus " << gm;
        previous = keep;
    }
}

TEST(ProjectorPopulation, DebyeProtectionWithNegativeHopping) {
    double previous = 0.0;
    for (double kappa : {0.0, -0.2, -0.4, -0.6}) {
        auto p = params(kappa, 0.0, 0.0);
        p.gamma_minus = debye_rate(1.0, 1.0, 1.0 - 2.0 * kappa);
        const double keep = symmetric_projector_population(p, 5.0).p_keep;
        EXPECT_GT(keep, previous) << "kappa " << kappa;
        previous = keep;
    }
}

TEST(SymmetricOverlap, Examples) {
    EXPECT_EQ(symmetric_overlap(params(0.0, 1.0, 2.0), 0.0), 3.0);
    EXPECT_NEAR(symmetric_overlap(params(0.0, 1.0, 2.0), 1000.0), 2.5, 1e-12);
    const double reference = symmetric_overlap(params(0.1, 0.0, 2.0), 3.7);
    for (double gp : {1.0, 10.0}) {
        EXPECT_NEAR(symmetric_overlap(params(0.1, gp, 2.0), 3.7), reference, 1e-15);
    }
}

TEST(SymmetricOverlap, EqualsProjectorTraceFromFullMap) {
    // Tr[P_sym(t) P_sym(0)] for the evolved symmetric projector: the outer triplet
    // states are stationary and |1,0> keeps p_keep of itself.
    const auto p = params(0.15, 0.8, 3.0);
    const Eigen::Matrix4cd sym = coupled_projector(CoupledState::Triplet_p1) +
                                 coupled_projector(CoupledState::Triplet_0) +
                                 coupled_projector(CoupledState::Triplet_m1);
    double total = 0.0;
    for (auto s : {CoupledState::Triplet_p1, CoupledState::Triplet_0, CoupledState::Triplet_m1}) {
        const auto rho = evolve_two_spins(TwoSpinDensityMatrix(coupled_projector(s)), p, 2.5);
        total += (sym * rho.elements()).trace().real();
    }
    EXPECT_NEAR(total, symmetric_overlap(p, 2.5), 1e-12);
}

TEST(EvolveTwoSpins, MatchesTwoModeOracle) {
    const auto p = params(0.1, 0.5, 2.0);
    const TwoSpinDensityMatrix rho0(product_x());
    std::vector<double> times;
    for (int i = 0; i <= 6; ++i) {
        times.push_back(0.5 * i);
    }
    ComparisonOptions options;
    options.n_max = 8;
    options.truncation_gate = false;
    const auto cmp = compare_two_spin(rho0, p, times, options);
    EXPECT_LE(cmp.max_deviation, 1e-3);
}
