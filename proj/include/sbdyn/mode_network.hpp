// mode_network.hpp — Normal modes of N coupled bosonic modes and the isolated symmetric mode

#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

namespace sbdyn {

/// Real symmetric inter-mode coupling kappa (zero diagonal) on top of a common
/// bare frequency omega0. omega0 * 1 + kappa must be positive definite.
class CouplingMatrix {
public:
    /// Throws DomainError on asymmetry, non-zero diagonal, n < 2 or loss of positivity.
    CouplingMatrix(Eigen::MatrixXd kappa, double omega0);

    Eigen::Index size() const noexcept { return kappa_.rows(); }
    const Eigen::MatrixXd& kappa() const noexcept { return kappa_; }
    double omega0() const noexcept { return omega0_; }
    /// omega0 * 1 + kappa.
    Eigen::MatrixXd mode_matrix() const;

private:
    Eigen::MatrixXd kappa_;
    double omega0_;
};

struct NormalModeDecomposition {
    /// Ascending normal-mode frequencies.
    Eigen::VectorXd eigenvalues;
    /// Column i is the orthonormal eigenvector of eigenvalues(i). Column 0 is
    /// sign-fixed so its entries sum to a positive number.
    Eigen::MatrixXd eigenvectors;
    /// (N^{-1/2} sum_j <j|lambda_1>)^2; empty when lambda_1 is degenerate.
    std::optional<double> symmetric_fidelity;

    double gap() const { return eigenvalues(1) - eigenvalues(0); }
};

/// All off-diagonal entries equal to kappa.
CouplingMatrix build_uniform_coupling(Eigen::Index n, double kappa, double omega0);

/// Off-diagonal entries i.i.d. uniform on [-kappa_max, 0], mirrored. The same
/// seed always gives the same matrix.
CouplingMatrix build_random_coupling(Eigen::Index n, double kappa_max, double omega0,
                                     std::uint64_t seed);

/// Diagonalises omega0 * 1 + kappa. Throws NumericError if the solver fails.
NormalModeDecomposition decompose(const CouplingMatrix& coupling);

/// Random-matrix predictions for i.i.d. couplings with mean mu < 0 and standard
/// deviation sigma.
struct FkPredictions {
    double lambda1_estimate;
    double expected_gap;
    double fidelity_error_bound;
};

/// lambda1 ~ omega0 - sigma^2/|mu| + (N-1) mu,
/// E[lambda2 - lambda1] ~ |mu| N + sigma^2/|mu| - 2 sigma sqrt(N),
/// 1 - F bound 2 sigma^2 / (N mu^2). Throws DomainError unless mu < 0.
FkPredictions fk_predictions(Eigen::Index n, double mu, double sigma, double omega0);

struct TwistingStrength {
    double chi;
    double time;
};

/// One-axis twisting strength r pi eta^2 / omega_s^2 reached at t = r pi / omega_s.
TwistingStrength twisting_strength(double eta, double omega_s, int r);

/// Stream seed for one member of an ensemble: a splitmix64 mix of the base seed
/// and the member's tag, so ensembles over N and seed never share a stream.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t tag);

} // namespace sbdyn
