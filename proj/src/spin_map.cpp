#include "sbdyn/spin_map.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbdyn/errors.hpp"

namespace sbdyn {

namespace {

void check_two_j(int two_j) {
    if (two_j < 1) {
        throw DomainError("spin needs 2j >= 1, got 2j = " + std::to_string(two_j));
    }
}

} // namespace

SpinDensityMatrix::SpinDensityMatrix(int two_j, Eigen::MatrixXcd elements,
                                     double transition_frequency)
    : two_j_(two_j), elements_(std::move(elements)), transition_frequency_(transition_frequency) {
    check_two_j(two_j);
    if (elements_.rows() != two_j + 1 || elements_.cols() != two_j + 1) {
        throw DomainError("spin-" + std::to_string(two_j) + "/2 state must be " +
                          std::to_string(two_j + 1) + "x" + std::to_string(two_j + 1));
    }
    check_density_matrix(elements_, {}, "spin state");
}

SpinDensityMatrix SpinDensityMatrix::pure(int two_j, const Eigen::VectorXcd& amplitudes) {
    check_two_j(two_j);
    const double norm = amplitudes.norm();
    if (amplitudes.size() != two_j + 1 || !(norm > 0.0)) {
        throw DomainError("pure spin state needs 2j+1 amplitudes with non-zero norm");
    }
    const Eigen::VectorXcd psi = amplitudes / norm;
    return SpinDensityMatrix(two_j, psi * psi.adjoint());
}

SpinDensityMatrix SpinDensityMatrix::coherent_x(int two_j) {
    check_two_j(two_j);
    // <j,m|+x> = 2^{-j} sqrt(C(2j, j+m)).
    Eigen::VectorXcd psi(two_j + 1);
    for (int k = 0; k <= two_j; ++k) {
        const double log_binom =
            std::lgamma(two_j + 1.0) - std::lgamma(k + 1.0) - std::lgamma(two_j - k + 1.0);
        psi(k) = std::exp(0.5 * log_binom - 0.5 * two_j * std::log(2.0));
    }
    return pure(two_j, psi);
}

SpinDensityMatrix SpinDensityMatrix::uniform_superposition(int two_j) {
    check_two_j(two_j);
    return pure(two_j, Eigen::VectorXcd::Ones(two_j + 1));
}

Eigen::MatrixXcd dephase_elements(const Eigen::MatrixXcd& rho, std::span<const double> m_values,
                                  const DephasingFactors& factors) {
    const Eigen::Index n = rho.rows();
    if (rho.cols() != n || static_cast<Eigen::Index>(m_values.size()) != n) {
        throw DomainError("dephasing labels do not match the matrix dimension");
    }
    Eigen::MatrixXcd out = rho;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double m = m_values[k];
        for (Eigen::Index kp = 0; kp < n; ++kp) {
            if (k == kp) {
                continue;
            }
            const double mp = m_values[kp];
            const double dm = m - mp;
            out(k, kp) *=
                std::exp(Complex(-dm * dm * factors.i_re, -(m * m - mp * mp) * factors.i_im));
        }
    }
    return out;
}

SpinDensityMatrix apply_dephasing(const SpinDensityMatrix& rho0, const DephasingFactors& factors) {
    std::vector<double> m_values(static_cast<std::size_t>(rho0.dimension()));
    for (Eigen::Index k = 0; k < rho0.dimension(); ++k) {
        m_values[static_cast<std::size_t>(k)] = rho0.m_of(k);
    }
    return SpinDensityMatrix(rho0.two_j(), dephase_elements(rho0.elements(), m_values, factors),
                             rho0.transition_frequency());
}

SpinDensityMatrix evolve_spin(const SpinDensityMatrix& rho0, std::span<const ModeSpec> modes,
                              double t) {
    return apply_dephasing(rho0, accumulate_factors(modes, t));
}

double coherence_magnitude(const SpinDensityMatrix& rho, Eigen::Index k, Eigen::Index kp) {
    if (k < 0 || kp < 0 || k >= rho.dimension() || kp >= rho.dimension()) {
        throw std::out_of_range("coherence index (" + std::to_string(k) + ", " +
                                std::to_string(kp) + ") outside spin-" +
                                std::to_string(rho.two_j()) + "/2 state");
    }
    return std::abs(rho(k, kp));
}

} // namespace sbdyn
