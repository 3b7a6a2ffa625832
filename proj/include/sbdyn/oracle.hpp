// oracle.hpp — Brute-force Lindblad integration on a truncated spin x Fock space

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sbdyn/density.hpp"
#include "sbdyn/spectral.hpp"

namespace sbdyn {

using SparseOperator = Eigen::SparseMatrix<Complex>;

/// Operators acting on one subsystem. Spin operators use the storage index
/// k = m + j of the spin factor; mode operators use the Fock index n.
enum class LocalOp {
    Jz,          // spin: diag(k - j)
    Projector,   // spin: |level><level|
    Lower,       // spin: J_-
    Raise,       // spin: J_+
    Annihilate,  // mode: v
    Create,      // mode: v^dagger
    Number,      // mode: v^dagger v
    Custom       // any subsystem: `matrix`
};

struct Factor {
    /// Subsystem index: spins first (0 .. spins-1), then modes.
    std::size_t subsystem;
    LocalOp op;
    Eigen::Index level{0};
    Eigen::MatrixXcd matrix{};
};

/// coefficient * exp(i rotation t) * (product of factors). Subsystems without
/// a factor carry the identity.
struct OperatorTerm {
    Complex coefficient{1.0};
    double rotation{0.0};
    std::vector<Factor> factors;
};

struct HamiltonianTerm {
    OperatorTerm term;
    /// Adds the Hermitian conjugate term as well.
    bool add_adjoint{false};
};

/// rate * (L rho L^dagger - {L^dagger L, rho}/2) with L the sum of `jump` terms.
/// Rotations on jump terms are ignored (they cancel in the dissipator).
struct Dissipator {
    std::vector<OperatorTerm> jump;
    double rate;
};

/// Interaction-picture master equation on spins (x) modes.
struct SystemSpec {
    std::vector<Eigen::Index> spin_dims;
    std::vector<Eigen::Index> mode_truncations;
    std::vector<HamiltonianTerm> hamiltonian;
    std::vector<Dissipator> dissipators;
    Eigen::Index dimension_cap{20000};

    std::size_t spin_count() const noexcept { return spin_dims.size(); }
    std::size_t subsystem_count() const noexcept {
        return spin_dims.size() + mode_truncations.size();
    }
    std::size_t mode_subsystem(std::size_t mode) const noexcept { return spin_dims.size() + mode; }
    Eigen::Index subsystem_dim(std::size_t subsystem) const;
    Eigen::Index spin_dimension() const;
    Eigen::Index mode_dimension() const;
    Eigen::Index dimension() const { return spin_dimension() * mode_dimension(); }
    /// Throws DomainError on bad dimensions, cap overflow, negative rates or
    /// factors that do not fit their subsystem.
    void validate() const;
};

/// Dense joint density matrix. The ordering is the Kronecker product with the
/// first subsystem most significant.
class JointState {
public:
    /// Full validation: Hermitian, unit trace, eigenvalue floor -1e-8.
    explicit JointState(Eigen::MatrixXcd rho);
    const Eigen::MatrixXcd& matrix() const noexcept { return rho_; }
    Eigen::Index dimension() const noexcept { return rho_.rows(); }

    /// Kronecker product of already validated factors; only the factors are checked.
    static JointState product(std::span<const Eigen::MatrixXcd> factors);

private:
    struct Unchecked {};
    JointState(Eigen::MatrixXcd rho, Unchecked) : rho_(std::move(rho)) {}
    Eigen::MatrixXcd rho_;
};

/// Truncated Boltzmann state of one mode, renormalised. Vacuum at zero
/// temperature. Throws TruncationError if the cutoff keeps less than 1 - 1e-6
/// of the weight, DomainError for n_max < 1.
Eigen::MatrixXcd build_thermal_state(Eigen::Index n_max, InverseTemperature beta, double omega);

/// ceil(4 nbar + 4 (2|eta|/omega)^2 + 10).
Eigen::Index auto_cutoff(const ModeSpec& mode);

/// 0.02 / (fastest rate in the spec): rotations, ladder couplings scaled by
/// sqrt(n_max), and dissipator rates.
double auto_time_step(const SystemSpec& spec);

/// Materialises one operator term on the full space.
SparseOperator embed(const SystemSpec& spec, const OperatorTerm& term);

struct IntegrationOptions {
    /// <= 0 selects auto_time_step.
    double dt{0.0};
    double trace_tolerance{1e-6};
    /// Repeat at dt/2 and require every reported element to agree.
    bool verify_halving{false};
    double halving_tolerance{1e-6};
};

struct IntegrationReport {
    double dt;
    Eigen::Index steps;
    double max_trace_drift;
    /// Largest element change under dt -> dt/2; negative when not checked.
    double halving_difference{-1.0};
};

/// Called at every sample time with the current state.
using SampleObserver = std::function<void(std::size_t index, double t, const Eigen::MatrixXcd&)>;

/// Classical RK4 on the interaction-picture master equation. Sample times must
/// be non-decreasing and >= 0; each is hit exactly. The state is re-Hermitised
/// after every step. Throws AccuracyError on trace drift beyond the tolerance.
IntegrationReport integrate(const SystemSpec& spec, const JointState& rho0,
                            std::span<const double> sample_times, const SampleObserver& observer,
                            const IntegrationOptions& options = {});

/// Convenience wrapper returning the reduced spin state at each sample time.
/// With verify_halving set, also integrates at dt/2 and throws AccuracyError if
/// any reduced element moves by more than the halving tolerance.
struct ReducedTrajectory {
    std::vector<double> times;
    std::vector<Eigen::MatrixXcd> spin_states;
    IntegrationReport report;
};
ReducedTrajectory integrate_reduced(const SystemSpec& spec, const JointState& rho0,
                                    std::span<const double> sample_times,
                                    const IntegrationOptions& options = {});

/// Exact partial trace over every mode factor.
Eigen::MatrixXcd partial_trace_spin(const Eigen::MatrixXcd& rho, const SystemSpec& spec);

/// <X(t) X(0)> for X = eta v + conj(eta) v^dagger of a single mode, computed as
/// Tr[X_I(t) e^{L t}(X rho_th)] with the spec's dissipators. The spec must have
/// no spins and one mode.
std::vector<Complex> two_time_quadrature_correlator(const SystemSpec& spec,
                                                    const Eigen::MatrixXcd& rho_thermal,
                                                    Complex eta, double omega,
                                                    std::span<const double> times,
                                                    const IntegrationOptions& options = {});

} // namespace sbdyn
