#include "sbdyn/mode_network.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "sbdyn/errors.hpp"

namespace sbdyn {

namespace {

double smallest_eigenvalue(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericError("symmetric eigensolver failed");
    }
    return solver.eigenvalues()(0);
}

// 53 random mantissa bits -> [0, 1). Fixed arithmetic so streams are portable.
double unit_uniform(std::mt19937_64& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t tag) {
    std::uint64_t z = base_seed + 0x9E3779B97F4A7C15ull * (tag + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

CouplingMatrix::CouplingMatrix(Eigen::MatrixXd kappa, double omega0)
    : kappa_(std::move(kappa)), omega0_(omega0) {
    if (kappa_.rows() != kappa_.cols() || kappa_.rows() < 2) {
        throw DomainError("coupling matrix must be square with at least 2 modes");
    }
    if (!(omega0 > 0.0) || !std::isfinite(omega0) || !kappa_.allFinite()) {
        throw DomainError("coupling matrix needs finite entries and omega0 > 0");
    }
    const Eigen::Index n = kappa_.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (kappa_(i, i) != 0.0) {
            throw DomainError("coupling matrix diagonal must be zero");
        }
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (kappa_(i, j) != kappa_(j, i)) {
                throw DomainError("coupling matrix must be symmetric");
            }
        }
    }
    const double lmin = smallest_eigenvalue(mode_matrix());
    if (!(lmin > 0.0)) {
        throw DomainError("omega0 * 1 + kappa is not positive (smallest eigenvalue " +
                          std::to_string(lmin) + ")");
    }
}

Eigen::MatrixXd CouplingMatrix::mode_matrix() const {
    Eigen::MatrixXd m = kappa_;
    m.diagonal().array() += omega0_;
    return m;
}

CouplingMatrix build_uniform_coupling(Eigen::Index n, double kappa, double omega0) {
    if (n < 2) {
        throw DomainError("uniform coupling needs n >= 2");
    }
    Eigen::MatrixXd k = Eigen::MatrixXd::Constant(n, n, kappa);
    k.diagonal().setZero();
    return {std::move(k), omega0};
}

CouplingMatrix build_random_coupling(Eigen::Index n, double kappa_max, double omega0,
                                     std::uint64_t seed) {
    if (n < 2) {
        throw DomainError("random coupling needs n >= 2");
    }
    if (!(kappa_max >= 0.0)) {
        throw DomainError("kappa_max must be >= 0");
    }
    std::mt19937_64 engine(seed);
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double value = -kappa_max * unit_uniform(engine);
            k(i, j) = value;
            k(j, i) = value;
        }
    }
    return {std::move(k), omega0};
}

NormalModeDecomposition decompose(const CouplingMatrix& coupling) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(coupling.mode_matrix());
    if (solver.info() != Eigen::Success) {
        throw NumericError("symmetric eigensolver failed");
    }
    NormalModeDecomposition out{solver.eigenvalues(), solver.eigenvectors(), std::nullopt};

    auto ground = out.eigenvectors.col(0);
    if (ground.sum() < 0.0) {
        ground = -ground;
    }
    const double scale = std::max(1.0, out.eigenvalues.cwiseAbs().maxCoeff());
    const bool degenerate = out.eigenvalues(1) - out.eigenvalues(0) <= 1e-12 * scale;
    if (!degenerate) {
        const double n = static_cast<double>(coupling.size());
        const double overlap = ground.sum() / std::sqrt(n);
        out.symmetric_fidelity = overlap * overlap;
    }
    return out;
}

FkPredictions fk_predictions(Eigen::Index n, double mu, double sigma, double omega0) {
    if (!(mu < 0.0)) {
        throw DomainError("random-matrix predictions need a negative mean coupling");
    }
    if (!(sigma >= 0.0) || n < 2) {
        throw DomainError("random-matrix predictions need sigma >= 0 and n >= 2");
    }
    const double nn = static_cast<double>(n);
    const double abs_mu = -mu;
    const double ratio = sigma * sigma / abs_mu;
    return {omega0 - ratio + (nn - 1.0) * mu, abs_mu * nn + ratio - 2.0 * sigma * std::sqrt(nn),
            2.0 * sigma * sigma / (nn * mu * mu)};
}

TwistingStrength twisting_strength(double eta, double omega_s, int r) {
    if (!(omega_s > 0.0) || r < 1) {
        throw DomainError("twisting strength needs omega_s > 0 and r >= 1");
    }
    const double phase = r * std::numbers::pi;
    return {phase * eta * eta / (omega_s * omega_s), phase / omega_s};
}

} // namespace sbdyn
