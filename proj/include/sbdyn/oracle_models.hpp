// oracle_models.hpp — Oracle systems for each analytic map and side-by-side comparison drivers

#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sbdyn/emitter.hpp"
#include "sbdyn/oracle.hpp"
#include "sbdyn/spin_map.hpp"
#include "sbdyn/two_spin.hpp"

namespace sbdyn {

/// One spin-j coupled through J_z to each mode, with thermal loss and heating
/// of every mode. n_max holds one cutoff per mode.
SystemSpec single_spin_system(int two_j, std::span<const ModeSpec> modes,
                              std::span<const Eigen::Index> n_max);

/// Two spin-1/2 coupled to the symmetric and antisymmetric normal modes, each
/// damped into its own bath. Subsystems: spin 1, spin 2, symmetric, antisymmetric.
SystemSpec two_spin_system(const TwoSpinParams& params, Eigen::Index n_max);

/// Emitter {|g>, |e>} coupled through |e><e| to its modes, plus optical decay
/// |g><e| at gamma_op and sigma_z dephasing at gamma_dp / 2.
SystemSpec emitter_system(const EmitterParams& params, std::span<const Eigen::Index> n_max);

/// A single damped mode with no spin, for the two-time correlator.
SystemSpec quadrature_system(const ModeSpec& mode, Eigen::Index n_max);

/// spin_state (x) thermal state of each mode.
JointState thermal_product_state(const SystemSpec& spec, const Eigen::MatrixXcd& spin_state,
                                 std::span<const ModeSpec> modes);

struct ComparisonOptions {
    /// Cutoff for every mode; <= 0 picks auto_cutoff per mode.
    Eigen::Index n_max{0};
    /// Re-run at ceil(1.5 n_max) and require reduced elements to agree.
    bool truncation_gate{true};
    double gate_tolerance{1e-4};
    IntegrationOptions integration{};
};

struct Comparison {
    std::vector<double> times;
    std::vector<Eigen::MatrixXcd> analytic;
    std::vector<Eigen::MatrixXcd> oracle;
    /// Largest elementwise |analytic - oracle| over all times.
    double max_deviation;
    std::vector<Eigen::Index> n_max;
    /// Largest elementwise change under the cutoff raise; negative if skipped.
    double truncation_difference{-1.0};
    IntegrationReport report;
};

/// Each driver throws TruncationError when the gate fails, AccuracyError from
/// the integrator, DomainError for invalid inputs.
Comparison compare_single_spin(const SpinDensityMatrix& rho0, std::span<const ModeSpec> modes,
                               std::span<const double> times, const ComparisonOptions& options);
Comparison compare_two_spin(const TwoSpinDensityMatrix& rho0, const TwoSpinParams& params,
                            std::span<const double> times, const ComparisonOptions& options);
Comparison compare_emitter(const EmitterState& rho0, const EmitterParams& params,
                           std::span<const double> times, const ComparisonOptions& options);

} // namespace sbdyn
