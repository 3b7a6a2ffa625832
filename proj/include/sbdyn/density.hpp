// density.hpp — Density-matrix checks shared by the spin maps and the oracle

#pragma once

#include <complex>
#include <string>

#include <Eigen/Dense>

namespace sbdyn {

using Complex = std::complex<double>;

struct DensityTolerances {
    double hermiticity{1e-12};
    double trace{1e-12};
    double eigenvalue_floor{-1e-10};
};

/// Largest |rho(i,j) - conj(rho(j,i))|.
double hermiticity_defect(const Eigen::MatrixXcd& rho);

/// Smallest eigenvalue of the Hermitian part of rho.
double min_eigenvalue(const Eigen::MatrixXcd& rho);

/// Throws DomainError naming `what` if rho is not square, Hermitian, unit trace
/// or positive semidefinite within the tolerances.
void check_density_matrix(const Eigen::MatrixXcd& rho, const DensityTolerances& tol,
                          const std::string& what);

/// Tr(rho^2) for Hermitian rho.
double purity(const Eigen::MatrixXcd& rho);

} // namespace sbdyn
