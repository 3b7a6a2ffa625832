#include "sbdyn/density.hpp"

#include <cmath>
#include <sstream>

#include "sbdyn/errors.hpp"

namespace sbdyn {

double hermiticity_defect(const Eigen::MatrixXcd& rho) {
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Eigen::MatrixXcd& rho) {
    const Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericError("Hermitian eigensolver failed");
    }
    return solver.eigenvalues().minCoeff();
}

void check_density_matrix(const Eigen::MatrixXcd& rho, const DensityTolerances& tol,
                          const std::string& what) {
    if (rho.rows() != rho.cols() || rho.rows() == 0) {
        throw DomainError(what + ": density matrix must be square and non-empty");
    }
    if (!rho.allFinite()) {
        throw DomainError(what + ": density matrix has non-finite entries");
    }
    std::ostringstream msg;
    const double herm = hermiticity_defect(rho);
    if (herm > tol.hermiticity) {
        msg << what << ": not Hermitian (defect " << herm << ")";
        throw DomainError(msg.str());
    }
    const Complex tr = rho.trace();
    if (std::abs(tr - 1.0) > tol.trace) {
        msg << what << ": trace " << tr.real() << (tr.imag() < 0 ? "" : "+") << tr.imag()
            << "i is not 1";
        throw DomainError(msg.str());
    }
    const double lmin = min_eigenvalue(rho);
    if (lmin < tol.eigenvalue_floor) {
        msg << what << ": not positive semidefinite (min eigenvalue " << lmin << ")";
        throw DomainError(msg.str());
    }
}

double purity(const Eigen::MatrixXcd& rho) {
    return (rho * rho).trace().real();
}

} // namespace sbdyn
