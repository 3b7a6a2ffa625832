#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "sbdyn/density.hpp"
#include "sbdyn/errors.hpp"
#include "sbdyn/oracle_models.hpp"
#include "sbdyn/spin_map.hpp"
#include "test_support.hpp"

using namespace sbdyn;
using sbdyn::test::max_abs_diff;
using sbdyn::test::random_density;

namespace {

constexpr double kPi = std::numbers::pi;
const InverseTemperature kZeroT = InverseTemperature::zero_temperature();

std::vector<ModeSpec> one_mode(double eta, double gamma, InverseTemperature beta = kZeroT) {
    return {ModeSpec(1.0, eta, gamma, beta)};
}

} // namespace

TEST(SpinDensityMatrix, ValidatesInput) {
    Eigen::MatrixXcd bad_trace = Eigen::MatrixXcd::Identity(2, 2);
    EXPECT_THROW(SpinDensityMatrix(1, bad_trace), DomainError);

    Eigen::MatrixXcd not_hermitian = 0.5 * Eigen::MatrixXcd::Identity(2, 2);
    not_hermitian(0, 1) = {0.1, 0.0};
    EXPECT_THROW(SpinDensityMatrix(1, not_hermitian), DomainError);

    Eigen::MatrixXcd negative(2, 2);
    negative << 1.5, 0.0, 0.0, -0.5;
    EXPECT_THROW(SpinDensityMatrix(1, negative), DomainError);

    EXPECT_THROW(SpinDensityMatrix(2, 0.5 * Eigen::MatrixXcd::Identity(2, 2)), DomainError);
    EXPECT_THROW(SpinDensityMatrix(0, Eigen::MatrixXcd::Identity(1, 1)), DomainError);
    EXPECT_NO_THROW(SpinDensityMatrix(1, 0.5 * Eigen::MatrixXcd::Identity(2, 2), 3.0));
}

TEST(SpinDensityMatrix, StandardStates) {
    const auto x = SpinDensityMatrix::coherent_x(1);
    for (Eigen::Index i = 0; i < 2; ++i) {
        for (Eigen::Index k = 0; k < 2; ++k) {
            EXPECT_NEAR(std::abs(x(i, k) - Complex(0.5, 0.0)), 0.0, 1e-15);
        }
    }
    const auto u = SpinDensityMatrix::uniform_superposition(2);
    EXPECT_EQ(u.dimension(), 3);
    EXPECT_NEAR(std::abs(u(0, 2) - Complex(1.0 / 3.0, 0.0)), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(u.m_of(0), -1.0);
    EXPECT_DOUBLE_EQ(x.m_of(1), 0.5);

    // Spin-1 coherent state along x has binomial populations (1/4, 1/2, 1/4).
    const auto x1 = SpinDensityMatrix::coherent_x(2);
    EXPECT_NEAR(x1(0, 0).real(), 0.25, 1e-15);
    EXPECT_NEAR(x1(1, 1).real(), 0.5, 1e-15);
    EXPECT_NEAR(purity(x1.elements()), 1.0, 1e-14);
}

TEST(CoherenceMagnitude, Examples) {
    const auto x = SpinDensityMatrix::coherent_x(1);
    EXPECT_DOUBLE_EQ(coherence_magnitude(x, 0, 1), 0.5);
    EXPECT_DOUBLE_EQ(coherence_magnitude(x, 1, 1), x(1, 1).real());
    EXPECT_THROW(coherence_magnitude(x, 2, 0), std::out_of_range);
    EXPECT_THROW(coherence_magnitude(x, 0, -1), std::out_of_range);
}

TEST(EvolveSpin, DiagonalStatesAreStationary) {
    std::mt19937_64 rng(3);
    const auto modes = one_mode(1.0, 0.7, InverseTemperature::finite(0.8));
    for (int two_j = 1; two_j <= 4; ++two_j) {
        Eigen::MatrixXcd rho = random_density(two_j + 1, rng);
        rho = Eigen::MatrixXcd(rho.diagonal().asDiagonal());
        const SpinDensityMatrix rho0(two_j, rho);
        for (double t : {0.5, 3.0, 17.0}) {
            EXPECT_EQ(evolve_spin(rho0, modes, t).elements(), rho);
        }
    }
}

TEST(EvolveSpin, HalfSpinRevivesAtTwoPi) {
    const auto rho0 = SpinDensityMatrix::coherent_x(1);
    const auto rho = evolve_spin(rho0, one_mode(1.0, 0.0), 2.0 * kPi);
    EXPECT_LT(max_abs_diff(rho.elements(), rho0.elements()), 1e-12);
    EXPECT_NEAR(purity(rho.elements()), 1.0, 1e-10);
    for (int n = 2; n <= 4; ++n) {
        const auto r = evolve_spin(rho0, one_mode(1.0, 0.0), 2.0 * kPi * n);
        EXPECT_NEAR(purity(r.elements()), 1.0, 1e-10) << "n = " << n;
    }
}

TEST(EvolveSpin, ElementwiseFormula) {
    const auto modes = one_mode(0.8, 0.4);
    const auto rho0 = SpinDensityMatrix::uniform_superposition(3);
    const double t = 2.3;
    // Factors from the library, map applied by hand.
    const auto f = dephasing_integrals_closed(modes[0], t);
    const auto rho = evolve_spin(rho0, modes, t);
    for (Eigen::Index k = 0; k < 4; ++k) {
        for (Eigen::Index kp = 0; kp < 4; ++kp) {
            const double m = k - 1.5;
            const double mp = kp - 1.5;
            const Complex expected =
                rho0(k, kp) *
                std::exp(Complex(-(m - mp) * (m - mp) * f.i_re, -(m * m - mp * mp) * f.i_im));
            EXPECT_NEAR(std::abs(rho(k, kp) - expected), 0.0, 1e-15);
        }
    }
}

TEST(EvolveSpin, RejectsNegativeTime) {
    EXPECT_THROW(evolve_spin(SpinDensityMatrix::coherent_x(1), one_mode(1.0, 0.1), -0.1), DomainError);
}

TEST(EvolveSpin, PreservesStateInvariantsOnRandomStates) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const DensityTolerances tol{1e-12, 1e-12, -1e-10};
    for (int trial = 0; trial < 60; ++trial) {
        const int two_j = 1 + trial % 5;
        const Eigen::Index rank = 1 + static_cast<Eigen::Index>(u(rng) * (two_j + 1));
        const SpinDensityMatrix rho0(two_j, random_density(two_j + 1, rng, rank));
        const std::vector<ModeSpec> modes{
            ModeSpec(0.3 + u(rng), 2.0 * u(rng), 5.0 * u(rng), kZeroT),
            ModeSpec(0.3 + u(rng), {u(rng), u(rng)}, 5.0 * u(rng),
                     InverseTemperature::finite(0.2 + 3.0 * u(rng)))};
        const double t = 20.0 * u(rng);
        const auto rho = evolve_spin(rho0, modes, t);
        EXPECT_NO_THROW(check_density_matrix(rho.elements(), tol, "evolved state"));
        EXPECT_NEAR(rho.elements().trace().real(), 1.0, 1e-12);
    }
}

TEST(EvolveSpin, NotASemigroupWithoutDamping) {
    const auto modes = one_mode(1.0, 0.0);
    const auto rho0 = SpinDensityMatrix::coherent_x(1);
    const double t1 = kPi;
    const double t2 = kPi;
    const auto stepped = evolve_spin(evolve_spin(rho0, modes, t1), modes, t2);
    const auto direct = evolve_spin(rho0, modes, t1 + t2);
    // Direct evolution revives at 2 pi, two half-periods compound the dephasing.
    EXPECT_GT(max_abs_diff(stepped.elements(), direct.elements()), 0.1);
}

TEST(EvolveSpin, NearSemigroupInAsymptoticRegime) {
    const auto modes = one_mode(1.0, 40.0);
    const auto rho0 = SpinDensityMatrix::coherent_x(1);
    const auto stepped = evolve_spin(evolve_spin(rho0, modes, 5.0), modes, 5.0);
    const auto direct = evolve_spin(rho0, modes, 10.0);
    // Each restart costs only the transient offset of I_Re, of order 1/Gamma^2.
    EXPECT_LT(max_abs_diff(stepped.elements(), direct.elements()), 1e-3);
}

TEST(EvolveSpin, MonotoneEnvelopeWithDamping) {
    std::mt19937_64 rng(5);
    const auto rho0 = SpinDensityMatrix(2, random_density(3, rng));
    for (double gamma : {0.05, 0.3, 3.0, 40.0}) {
        const auto modes = one_mode(1.0, gamma);
        for (int i = 0; i <= 200; ++i) {
            const auto rho = evolve_spin(rho0, modes, 0.1 * i);
            for (Eigen::Index k = 0; k < 3; ++k) {
                for (Eigen::Index kp = 0; kp < 3; ++kp) {
                    EXPECT_LE(std::abs(rho(k, kp)), std::abs(rho0(k, kp)) + 1e-15);
                }
            }
        }
    }
}

TEST(EvolveSpin, ZenoOrderingAtLongTime) {
    const auto rho0 = SpinDensityMatrix::coherent_x(1);
    const double strong = coherence_magnitude(evolve_spin(rho0, one_mode(1.0, 40.0), 10.0), 0, 1);
    const double moderate = coherence_magnitude(evolve_spin(rho0, one_mode(1.0, 3.0), 10.0), 0, 1);
    EXPECT_GT(strong, moderate);
}

TEST(ApplyDephasing, ZeroFactorsIsIdentity) {
    std::mt19937_64 rng(9);
    const SpinDensityMatrix rho0(3, random_density(4, rng));
    EXPECT_EQ(apply_dephasing(rho0, DephasingFactors{}).elements(), rho0.elements());
}

TEST(DephaseElements, CustomLabels) {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Constant(2, 2, Complex(0.5, 0.0));
    const double labels[] = {0.0, 1.0};
    const auto out = dephase_elements(rho, labels, DephasingFactors{0.3, 0.2});
    EXPECT_NEAR(std::abs(out(0, 1) - 0.5 * std::exp(Complex(-0.3, 0.2))), 0.0, 1e-16);
    EXPECT_NEAR(std::abs(out(1, 0) - 0.5 * std::exp(Complex(-0.3, -0.2))), 0.0, 1e-16);
    EXPECT_EQ(out(0, 0), rho(0, 0));
}

TEST(EvolveSpin, SpinOneMatchesOracleAtFixedTime) {
    const auto modes = one_mode(1.0, 0.3);
    const auto rho0 = SpinDensityMatrix::uniform_superposition(2);
    const std::vector<double> times{0.0, 1.5, 3.0};
    ComparisonOptions options;
    options.n_max = 40;
    options.truncation_gate = false;
    const auto cmp = compare_single_spin(rho0, modes, times, options);
    EXPECT_LE(cmp.max_deviation, 1e-3);
    EXPECT_LE(max_abs_diff(cmp.analytic.back(), cmp.oracle.back()), 1e-3);
}

TEST(EvolveSpin, TwoModesAndThermalBathMatchOracle) {
    const std::vector<ModeSpec> modes{ModeSpec(1.0, 0.5, 0.3, InverseTemperature::finite(1.0)),
                                      ModeSpec(1.7, 0.4, 3.0, kZeroT)};
    const auto rho0 = SpinDensityMatrix::coherent_x(1);
    std::vector<double> times;
    for (int i = 0; i <= 8; ++i) {
        times.push_back(0.5 * i);
    }
    ComparisonOptions options;
    options.truncation_gate = false;
    options.n_max = 16;
    const auto cmp = compare_single_spin(rho0, modes, times, options);
    EXPECT_LE(cmp.max_deviation, 1e-3);
}
