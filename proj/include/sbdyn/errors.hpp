// errors.hpp — Exception types shared by the analytic maps and the oracle

#pragma once

#include <stdexcept>
#include <string>

namespace sbdyn {

/// A parameter lies outside the domain where a formula is defined.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Adaptive quadrature exhausted its budget. Carries the best estimate.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double estimate, double error_estimate)
        : std::runtime_error(what), estimate_(estimate), error_estimate_(error_estimate) {}

    double estimate() const noexcept { return estimate_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double estimate_;
    double error_estimate_;
};

/// ODE integration drifted (trace loss, step-halving disagreement).
class AccuracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A Fock cutoff discards too much of a state's weight.
class TruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Linear-algebra failure (eigensolver did not converge etc).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sbdyn
