// spectral.hpp — Damped thermal-mode correlation functions and dephasing integrals

#pragma once

#include <complex>
#include <limits>
#include <span>

namespace sbdyn {

/// Inverse temperature. Zero temperature is a distinguished state, not a large float.
class InverseTemperature {
public:
    static constexpr InverseTemperature zero_temperature() noexcept { return InverseTemperature(); }
    /// Throws DomainError unless 0 < beta < inf. Use zero_temperature() for beta = inf.
    static InverseTemperature finite(double beta);
    /// Accepts +inf as zero temperature.
    static InverseTemperature from_value(double beta);

    bool is_zero_temperature() const noexcept { return zero_; }
    /// +inf at zero temperature.
    double value() const noexcept {
        return zero_ ? std::numeric_limits<double>::infinity() : beta_;
    }

    friend bool operator==(const InverseTemperature&, const InverseTemperature&) = default;

private:
    constexpr InverseTemperature() noexcept = default;
    bool zero_{true};
    double beta_{0.0};
};

/// One bosonic mode: frequency, complex spin-mode coupling, decay rate into its
/// local thermal bath, and that bath's inverse temperature. All quantities are
/// in units of a caller-chosen reference frequency.
class ModeSpec {
public:
    /// Throws DomainError for omega <= 0, gamma < 0 or non-finite inputs.
    ModeSpec(double omega, std::complex<double> eta, double gamma, InverseTemperature beta);

    double omega() const noexcept { return omega_; }
    std::complex<double> eta() const noexcept { return eta_; }
    double gamma() const noexcept { return gamma_; }
    InverseTemperature beta() const noexcept { return beta_; }
    double coupling_squared() const noexcept { return std::norm(eta_); }

    ModeSpec with_gamma(double gamma) const { return {omega_, eta_, gamma, beta_}; }
    ModeSpec with_eta(std::complex<double> eta) const { return {omega_, eta, gamma_, beta_}; }

private:
    double omega_;
    std::complex<double> eta_;
    double gamma_;
    InverseTemperature beta_;
};

/// The pair (I_Re, I_Im): double time integrals of the real and imaginary part
/// of the mode correlation function. Dimensionless.
struct DephasingFactors {
    double i_re{0.0};
    double i_im{0.0};

    DephasingFactors& operator+=(const DephasingFactors& other) noexcept {
        i_re += other.i_re;
        i_im += other.i_im;
        return *this;
    }
};

/// Long-time slopes dI_Re/dt and dI_Im/dt.
struct AsymptoticRates {
    double rate_re;
    double rate_im;
};

/// coth(x) for x > 0: exactly 1 above x = 100, series 1/x + x/3 below 1e-4.
double stable_coth(double x);

/// coth(beta*omega/2); exactly 1 at zero temperature.
double thermal_factor(InverseTemperature beta, double omega);

/// Mean occupation 1/(exp(beta*omega) - 1). Exactly 0 at zero temperature or
/// beta*omega > 700.
double thermal_occupation(InverseTemperature beta, double omega);

/// C(t) = |eta|^2 exp(-gamma t/2) [coth(beta omega/2) cos(omega t) - i sin(omega t)].
std::complex<double> correlation_function(const ModeSpec& mode, double t);

/// Closed-form I_Re, I_Im for one damped mode. Below gamma < 1e-10 omega the
/// undamped branch is used.
DephasingFactors dephasing_integrals_closed(const ModeSpec& mode, double t);

/// gamma -> 0 limit; mode.gamma() is ignored.
DephasingFactors dephasing_integrals_undamped(const ModeSpec& mode, double t);

/// Reference evaluation of the defining nested integrals. The inner integral is
/// done analytically, the outer one by adaptive Gauss-Kronrod to absolute
/// accuracy `tol` per component. Throws ConvergenceError if the panel budget is
/// exhausted.
DephasingFactors dephasing_integrals_quadrature(const ModeSpec& mode, double t, double tol);

/// Same as above for the summed correlation function of several modes.
DephasingFactors dephasing_integrals_quadrature(std::span<const ModeSpec> modes, double t,
                                                double tol);

/// Slopes of I_Re, I_Im once gamma t >> 1. Throws DomainError for gamma = 0.
AsymptoticRates asymptotic_rates(const ModeSpec& mode);

/// Sum of dephasing_integrals_closed over the modes. Throws DomainError on an
/// empty list.
DephasingFactors accumulate_factors(std::span<const ModeSpec> modes, double t);

} // namespace sbdyn
