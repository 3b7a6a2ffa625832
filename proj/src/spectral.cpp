#include "sbdyn/spectral.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sbdyn/errors.hpp"

namespace sbdyn {

namespace {

void require_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw DomainError("time must be finite and >= 0, got " + std::to_string(t));
    }
}

struct Estimate {
    double value;
    double error;
};

// One Gauss-Kronrod 7-15 panel: boost supplies nodes, weights and |K15 - G7|.
template <class F>
Estimate gk15_panel(const F& f, double a, double b) {
    double error = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &error);
    return {value, error};
}

constexpr int kMaxDepth = 48;
constexpr long kMaxPanels = 200000;

// Bisection with the absolute tolerance halved on each child.
template <class F>
Estimate adaptive(const F& f, double a, double b, double tol, const Estimate& whole, int depth,
                  long& panels) {
    if (whole.error <= tol || (b - a) <= 1e-15 * (std::abs(a) + std::abs(b))) {
        return whole;
    }
    if (depth >= kMaxDepth || panels >= kMaxPanels) {
        throw ConvergenceError("adaptive quadrature exceeded its panel budget", whole.value,
                               whole.error);
    }
    const double mid = 0.5 * (a + b);
    const Estimate left = gk15_panel(f, a, mid);
    const Estimate right = gk15_panel(f, mid, b);
    panels += 2;
    const Estimate l = adaptive(f, a, mid, 0.5 * tol, left, depth + 1, panels);
    const Estimate r = adaptive(f, mid, b, 0.5 * tol, right, depth + 1, panels);
    return {l.value + r.value, l.error + r.error};
}

template <class F>
double integrate_outer(const F& f, double t, double tol) {
    if (t == 0.0) {
        return 0.0;
    }
    long panels = 1;
    const Estimate whole = gk15_panel(f, 0.0, t);
    return adaptive(f, 0.0, t, tol, whole, 0, panels).value;
}

// Integrals over tau in [0, s] of exp(-a tau) cos(w tau) and exp(-a tau) sin(w tau).
double damped_cos_integral(double a, double w, double s) {
    const double decay = std::exp(-a * s);
    return (a - decay * (a * std::cos(w * s) - w * std::sin(w * s))) / (a * a + w * w);
}

double damped_sin_integral(double a, double w, double s) {
    const double decay = std::exp(-a * s);
    return (w - decay * (a * std::sin(w * s) + w * std::cos(w * s))) / (a * a + w * w);
}

} // namespace

InverseTemperature InverseTemperature::finite(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw DomainError("inverse temperature must be finite and > 0, got " +
                          std::to_string(beta));
    }
    InverseTemperature b;
    b.zero_ = false;
    b.beta_ = beta;
    return b;
}

InverseTemperature InverseTemperature::from_value(double beta) {
    if (std::isinf(beta) && beta > 0.0) {
        return zero_temperature();
    }
    return finite(beta);
}

ModeSpec::ModeSpec(double omega, std::complex<double> eta, double gamma, InverseTemperature beta)
    : omega_(omega), eta_(eta), gamma_(gamma), beta_(beta) {
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw DomainError("mode frequency must be finite and > 0, got " + std::to_string(omega));
    }
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw DomainError("mode decay rate must be finite and >= 0, got " +
                          std::to_string(gamma));
    }
    if (!std::isfinite(eta.real()) || !std::isfinite(eta.imag())) {
        throw DomainError("mode coupling must be finite");
    }
}

double stable_coth(double x) {
    if (x > 100.0) {
        return 1.0;
    }
    if (x < 1e-4) {
        return 1.0 / x + x / 3.0;
    }
    return 1.0 / std::tanh(x);
}

double thermal_factor(InverseTemperature beta, double omega) {
    if (beta.is_zero_temperature()) {
        return 1.0;
    }
    return stable_coth(0.5 * beta.value() * omega);
}

double thermal_occupation(InverseTemperature beta, double omega) {
    if (!(omega > 0.0)) {
        throw DomainError("thermal occupation needs omega > 0, got " + std::to_string(omega));
    }
    if (beta.is_zero_temperature()) {
        return 0.0;
    }
    const double x = beta.value() * omega;
    if (x > 700.0) {
        return 0.0;
    }
    return 1.0 / std::expm1(x);
}

std::complex<double> correlation_function(const ModeSpec& mode, double t) {
    require_time(t);
    const double w = mode.omega();
    const double envelope = mode.coupling_squared() * std::exp(-0.5 * mode.gamma() * t);
    return envelope *
           std::complex<double>(thermal_factor(mode.beta(), w) * std::cos(w * t), -std::sin(w * t));
}

DephasingFactors dephasing_integrals_undamped(const ModeSpec& mode, double t) {
    require_time(t);
    const double w = mode.omega();
    const double scale = mode.coupling_squared() / (w * w);
    const double s = std::sin(0.5 * w * t);
    return {2.0 * scale * thermal_factor(mode.beta(), w) * s * s,
            scale * (std::sin(w * t) - w * t)};
}

DephasingFactors dephasing_integrals_closed(const ModeSpec& mode, double t) {
    require_time(t);
    const double w = mode.omega();
    const double g = mode.gamma();
    if (g < 1e-10 * w) {
        return dephasing_integrals_undamped(mode, t);
    }
    const double eta2 = mode.coupling_squared();
    const double d = g * g + 4.0 * w * w;
    const double split = g * g - 4.0 * w * w;
    const double decay = std::exp(-0.5 * g * t);
    const double sn = std::sin(w * t);
    const double cs = std::cos(w * t);

    const double re = 2.0 * eta2 * thermal_factor(mode.beta(), w) / (d * d) *
                      (-2.0 * split + g * t * d + decay * (-8.0 * g * w * sn + 2.0 * split * cs));
    const double im = 4.0 * eta2 / (d * d) *
                      (4.0 * w * g - w * t * d - decay * (split * sn + 4.0 * g * w * cs));
    return {re, im};
}

DephasingFactors dephasing_integrals_quadrature(std::span<const ModeSpec> modes, double t,
                                                double tol) {
    require_time(t);
    if (!(tol > 0.0)) {
        throw DomainError("quadrature tolerance must be > 0");
    }
    if (modes.empty()) {
        throw DomainError("quadrature needs at least one mode");
    }
    // Outer integrands: F(s) = int_0^s C(tau) dtau, split into real and imaginary parts.
    auto inner_re = [modes](double s) {
        double acc = 0.0;
        for (const auto& m : modes) {
            acc += m.coupling_squared() * thermal_factor(m.beta(), m.omega()) *
                   damped_cos_integral(0.5 * m.gamma(), m.omega(), s);
        }
        return acc;
    };
    auto inner_im = [modes](double s) {
        double acc = 0.0;
        for (const auto& m : modes) {
            acc -= m.coupling_squared() * damped_sin_integral(0.5 * m.gamma(), m.omega(), s);
        }
        return acc;
    };
    return {integrate_outer(inner_re, t, tol), integrate_outer(inner_im, t, tol)};
}

DephasingFactors dephasing_integrals_quadrature(const ModeSpec& mode, double t, double tol) {
    return dephasing_integrals_quadrature(std::span<const ModeSpec>(&mode, 1), t, tol);
}

AsymptoticRates asymptotic_rates(const ModeSpec& mode) {
    const double g = mode.gamma();
    if (!(g > 0.0)) {
        throw DomainError("asymptotic rates need gamma > 0");
    }
    const double w = mode.omega();
    const double eta2 = mode.coupling_squared();
    const double d = g * g + 4.0 * w * w;
    return {2.0 * eta2 * thermal_factor(mode.beta(), w) * g / d, -4.0 * eta2 * w / d};
}

DephasingFactors accumulate_factors(std::span<const ModeSpec> modes, double t) {
    if (modes.empty()) {
        throw DomainError("accumulate_factors needs at least one mode");
    }
    DephasingFactors total;
    for (const auto& m : modes) {
        total += dephasing_integrals_closed(m, t);
    }
    return total;
}

} // namespace sbdyn
