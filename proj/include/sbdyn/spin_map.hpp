// spin_map.hpp — Exact reduced dynamics of one spin-j under pure dephasing by damped modes

#pragma once

#include <span>

#include <Eigen/Dense>

#include "sbdyn/density.hpp"
#include "sbdyn/spectral.hpp"

namespace sbdyn {

/// Reduced state of a spin-j in the j_z eigenbasis. Storage index k = m + j runs
/// over 0..2j, so element (k, k') is <j, k-j| rho |j, k'-j>.
class SpinDensityMatrix {
public:
    /// Validates Hermiticity, unit trace and positivity (floor -1e-10).
    SpinDensityMatrix(int two_j, Eigen::MatrixXcd elements, double transition_frequency = 0.0);

    /// Projector onto the normalised amplitude vector (indexed by k = m + j).
    static SpinDensityMatrix pure(int two_j, const Eigen::VectorXcd& amplitudes);
    /// Spin coherent state pointing along +x.
    static SpinDensityMatrix coherent_x(int two_j);
    /// Equal-weight superposition of all m.
    static SpinDensityMatrix uniform_superposition(int two_j);

    int two_j() const noexcept { return two_j_; }
    double j() const noexcept { return 0.5 * two_j_; }
    Eigen::Index dimension() const noexcept { return two_j_ + 1; }
    /// m eigenvalue of storage index k.
    double m_of(Eigen::Index k) const noexcept { return static_cast<double>(k) - j(); }

    const Eigen::MatrixXcd& elements() const noexcept { return elements_; }
    Complex operator()(Eigen::Index k, Eigen::Index kp) const { return elements_(k, kp); }

    /// Bare spin splitting. Interaction-picture dynamics never use it.
    double transition_frequency() const noexcept { return transition_frequency_; }

private:
    int two_j_;
    Eigen::MatrixXcd elements_;
    double transition_frequency_;
};

/// Elementwise dephasing of a matrix whose row/column k carries the Jz-like
/// eigenvalue m_values[k]. Diagonal entries are untouched.
Eigen::MatrixXcd dephase_elements(const Eigen::MatrixXcd& rho, std::span<const double> m_values,
                                  const DephasingFactors& factors);

/// Elementwise map rho_{mm'} -> rho_{mm'} exp[-i(m^2 - m'^2) I_Im - (m - m')^2 I_Re].
SpinDensityMatrix apply_dephasing(const SpinDensityMatrix& rho0, const DephasingFactors& factors);

/// Reduced state at time t, always propagated from t = 0 (the map is not divisible).
SpinDensityMatrix evolve_spin(const SpinDensityMatrix& rho0, std::span<const ModeSpec> modes,
                              double t);

/// |rho(k, kp)|. Throws std::out_of_range for bad indices.
double coherence_magnitude(const SpinDensityMatrix& rho, Eigen::Index k, Eigen::Index kp);

} // namespace sbdyn
