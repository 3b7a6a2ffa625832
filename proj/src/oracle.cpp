#include "sbdyn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "sbdyn/errors.hpp"

namespace sbdyn {

namespace {

constexpr Complex kI{0.0, 1.0};

bool is_spin_op(LocalOp op) {
    return op == LocalOp::Jz || op == LocalOp::Projector || op == LocalOp::Lower ||
           op == LocalOp::Raise;
}

bool is_mode_op(LocalOp op) {
    return op == LocalOp::Annihilate || op == LocalOp::Create || op == LocalOp::Number;
}

SparseOperator sparse_identity(Eigen::Index n) {
    SparseOperator id(n, n);
    id.setIdentity();
    return id;
}

SparseOperator from_triplets(Eigen::Index n, const std::vector<Eigen::Triplet<Complex>>& t) {
    SparseOperator op(n, n);
    op.setFromTriplets(t.begin(), t.end());
    return op;
}

SparseOperator local_operator(Eigen::Index dim, const Factor& f) {
    std::vector<Eigen::Triplet<Complex>> t;
    const double j = 0.5 * static_cast<double>(dim - 1);
    switch (f.op) {
    case LocalOp::Jz:
        for (Eigen::Index k = 0; k < dim; ++k) {
            const double m = static_cast<double>(k) - j;
            if (m != 0.0) {
                t.emplace_back(k, k, m);
            }
        }
        break;
    case LocalOp::Projector:
        t.emplace_back(f.level, f.level, 1.0);
        break;
    case LocalOp::Raise:
    case LocalOp::Lower:
        for (Eigen::Index k = 0; k + 1 < dim; ++k) {
            const double m = static_cast<double>(k) - j;
            const double amp = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
            if (f.op == LocalOp::Raise) {
                t.emplace_back(k + 1, k, amp);
            } else {
                t.emplace_back(k, k + 1, amp);
            }
        }
        break;
    case LocalOp::Annihilate:
        for (Eigen::Index n = 1; n < dim; ++n) {
            t.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
        }
        break;
    case LocalOp::Create:
        for (Eigen::Index n = 1; n < dim; ++n) {
            t.emplace_back(n, n - 1, std::sqrt(static_cast<double>(n)));
        }
        break;
    case LocalOp::Number:
        for (Eigen::Index n = 1; n < dim; ++n) {
            t.emplace_back(n, n, static_cast<double>(n));
        }
        break;
    case LocalOp::Custom:
        return f.matrix.sparseView();
    }
    return from_triplets(dim, t);
}

SparseOperator sparse_kron(const SparseOperator& a, const SparseOperator& b) {
    std::vector<Eigen::Triplet<Complex>> t;
    t.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
    for (Eigen::Index ca = 0; ca < a.outerSize(); ++ca) {
        for (SparseOperator::InnerIterator ia(a, ca); ia; ++ia) {
            for (Eigen::Index cb = 0; cb < b.outerSize(); ++cb) {
                for (SparseOperator::InnerIterator ib(b, cb); ib; ++ib) {
                    t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                                   ia.value() * ib.value());
                }
            }
        }
    }
    SparseOperator out(a.rows() * b.rows(), a.cols() * b.cols());
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

// Tr[A B] for sparse A and dense B.
Complex trace_product(const SparseOperator& a, const Eigen::MatrixXcd& b) {
    Complex sum{0.0};
    for (Eigen::Index c = 0; c < a.outerSize(); ++c) {
        for (SparseOperator::InnerIterator it(a, c); it; ++it) {
            sum += it.value() * b(it.col(), it.row());
        }
    }
    return sum;
}

void hermitise(Eigen::MatrixXcd& rho) {
    const Eigen::Index n = rho.rows();
    for (Eigen::Index c = 0; c < n; ++c) {
        rho(c, c) = rho(c, c).real();
        for (Eigen::Index r = c + 1; r < n; ++r) {
            const Complex avg = 0.5 * (rho(r, c) + std::conj(rho(c, r)));
            rho(r, c) = avg;
            rho(c, r) = std::conj(avg);
        }
    }
}

// The master-equation generator with the time dependence of the Hamiltonian
// kept symbolic until evaluation.
class Generator {
public:
    explicit Generator(const SystemSpec& spec) : dim_(spec.dimension()) {
        for (const auto& h : spec.hamiltonian) {
            SparseOperator op = embed(spec, h.term);
            if (h.add_adjoint) {
                SparseOperator adj = op.adjoint();
                terms_.push_back({std::move(adj), -h.term.rotation});
            }
            terms_.push_back({std::move(op), h.term.rotation});
        }
        anticommutator_ = SparseOperator(dim_, dim_);
        for (const auto& d : spec.dissipators) {
            if (d.rate == 0.0) {
                continue;
            }
            SparseOperator l(dim_, dim_);
            for (const auto& term : d.jump) {
                OperatorTerm static_term = term;
                static_term.rotation = 0.0;
                l += embed(spec, static_term);
            }
            l *= std::sqrt(d.rate);
            l.prune(Complex(0.0));
            SparseOperator ldl = l.adjoint() * l;
            anticommutator_ += ldl;
            jumps_.push_back(std::move(l));
        }
    }

    SparseOperator effective_hamiltonian(double t) const {
        SparseOperator h = Complex(0.0, -0.5) * anticommutator_;
        for (const auto& term : terms_) {
            h += std::exp(kI * (term.rotation * t)) * term.op;
        }
        return h;
    }

    // out = L(rho) at time t. `work` is scratch of the same size as rho.
    void rhs(double t, const Eigen::MatrixXcd& rho, bool hermitian, Eigen::MatrixXcd& out,
             Eigen::MatrixXcd& work) const {
        const SparseOperator h = effective_hamiltonian(t);
        work.noalias() = h * rho;
        if (hermitian) {
            out.noalias() = -kI * (work - work.adjoint());
            for (const auto& l : jumps_) {
                work.noalias() = l * rho;
                out.noalias() += l * work.adjoint();
            }
        } else {
            out.noalias() = -kI * work;
            const Eigen::MatrixXcd rho_dag = rho.adjoint();
            work.noalias() = h * rho_dag;
            out.noalias() += kI * work.adjoint();
            for (const auto& l : jumps_) {
                work.noalias() = l * rho_dag;
                out.noalias() += l * work.adjoint();
            }
        }
    }

    Eigen::Index dimension() const noexcept { return dim_; }

private:
    struct Term {
        SparseOperator op;
        double rotation;
    };
    Eigen::Index dim_;
    std::vector<Term> terms_;
    std::vector<SparseOperator> jumps_;
    SparseOperator anticommutator_;
};

void check_sample_times(std::span<const double> times) {
    double prev = 0.0;
    for (double t : times) {
        if (!std::isfinite(t) || t < prev) {
            throw DomainError("sample times must be finite, >= 0 and non-decreasing");
        }
        prev = t;
    }
}

// Propagates `rho` through the sample times, calling observer at each.
IntegrationReport propagate(const Generator& gen, Eigen::MatrixXcd rho, bool hermitian,
                            std::span<const double> times, const SampleObserver& observer,
                            double dt, double trace_tolerance) {
    check_sample_times(times);
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw DomainError("time step must be finite and > 0");
    }
    const Complex trace0 = rho.trace();
    const double trace_scale = std::max(1.0, std::abs(trace0));
    IntegrationReport report{dt, 0, 0.0};

    const Eigen::Index n = gen.dimension();
    Eigen::MatrixXcd k1(n, n), k2(n, n), k3(n, n), k4(n, n), stage(n, n), work(n, n);
    double t = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double target = times[i];
        const double span = target - t;
        if (span > 0.0) {
            const auto steps = static_cast<Eigen::Index>(std::ceil(span / dt - 1e-9));
            const double h = span / static_cast<double>(steps);
            for (Eigen::Index s = 0; s < steps; ++s) {
                const double ts = t + static_cast<double>(s) * h;
                gen.rhs(ts, rho, hermitian, k1, work);
                stage.noalias() = rho + (0.5 * h) * k1;
                gen.rhs(ts + 0.5 * h, stage, hermitian, k2, work);
                stage.noalias() = rho + (0.5 * h) * k2;
                gen.rhs(ts + 0.5 * h, stage, hermitian, k3, work);
                stage.noalias() = rho + h * k3;
                gen.rhs(ts + h, stage, hermitian, k4, work);
                rho.noalias() += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                if (hermitian) {
                    hermitise(rho);
                }
                const double drift = std::abs(rho.trace() - trace0) / trace_scale;
                report.max_trace_drift = std::max(report.max_trace_drift, drift);
                if (!(drift <= trace_tolerance)) {
                    std::ostringstream msg;
                    msg << "trace drift " << drift << " exceeds " << trace_tolerance
                        << " at t = " << ts + h << " (dt = " << h << ")";
                    throw AccuracyError(msg.str());
                }
            }
            report.steps += steps;
            t = target;
        }
        if (observer) {
            observer(i, target, rho);
        }
    }
    return report;
}

double resolve_dt(const SystemSpec& spec, const IntegrationOptions& options) {
    return options.dt > 0.0 ? options.dt : auto_time_step(spec);
}

} // namespace

Eigen::Index SystemSpec::subsystem_dim(std::size_t subsystem) const {
    if (subsystem < spin_dims.size()) {
        return spin_dims[subsystem];
    }
    if (subsystem < subsystem_count()) {
        return mode_truncations[subsystem - spin_dims.size()] + 1;
    }
    throw DomainError("subsystem index " + std::to_string(subsystem) + " out of range");
}

Eigen::Index SystemSpec::spin_dimension() const {
    Eigen::Index d = 1;
    for (auto s : spin_dims) {
        d *= s;
    }
    return d;
}

Eigen::Index SystemSpec::mode_dimension() const {
    Eigen::Index d = 1;
    for (auto n : mode_truncations) {
        d *= n + 1;
    }
    return d;
}

void SystemSpec::validate() const {
    if (subsystem_count() == 0) {
        throw DomainError("system has no subsystems");
    }
    double dim = 1.0;
    for (auto s : spin_dims) {
        if (s < 2) {
            throw DomainError("spin dimensions must be >= 2");
        }
        dim *= static_cast<double>(s);
    }
    for (auto n : mode_truncations) {
        if (n < 1) {
            throw DomainError("Fock cutoffs must be >= 1");
        }
        dim *= static_cast<double>(n + 1);
    }
    if (dim > static_cast<double>(dimension_cap)) {
        throw DomainError("joint dimension " + std::to_string(static_cast<long long>(dim)) +
                          " exceeds the cap " + std::to_string(dimension_cap));
    }
    auto check_term = [&](const OperatorTerm& term) {
        if (!std::isfinite(term.coefficient.real()) || !std::isfinite(term.coefficient.imag()) ||
            !std::isfinite(term.rotation)) {
            throw DomainError("operator term has a non-finite coefficient or rotation");
        }
        for (const auto& f : term.factors) {
            if (f.subsystem >= subsystem_count()) {
                throw DomainError("factor refers to subsystem " + std::to_string(f.subsystem) +
                                  " of " + std::to_string(subsystem_count()));
            }
            const bool on_spin = f.subsystem < spin_dims.size();
            if ((is_spin_op(f.op) && !on_spin) || (is_mode_op(f.op) && on_spin)) {
                throw DomainError("operator kind does not match subsystem " +
                                  std::to_string(f.subsystem));
            }
            const Eigen::Index d = subsystem_dim(f.subsystem);
            if (f.op == LocalOp::Projector && (f.level < 0 || f.level >= d)) {
                throw DomainError("projector level out of range");
            }
            if (f.op == LocalOp::Custom && (f.matrix.rows() != d || f.matrix.cols() != d)) {
                throw DomainError("custom factor has the wrong dimension");
            }
        }
    };
    for (const auto& h : hamiltonian) {
        check_term(h.term);
    }
    for (const auto& d : dissipators) {
        if (!(d.rate >= 0.0) || !std::isfinite(d.rate)) {
            throw DomainError("dissipator rates must be finite and >= 0");
        }
        for (const auto& term : d.jump) {
            check_term(term);
        }
    }
}

JointState::JointState(Eigen::MatrixXcd rho) : rho_(std::move(rho)) {
    check_density_matrix(rho_, {1e-10, 1e-10, -1e-8}, "joint state");
}

JointState JointState::product(std::span<const Eigen::MatrixXcd> factors) {
    if (factors.empty()) {
        throw DomainError("product state needs at least one factor");
    }
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Ones(1, 1);
    for (const auto& f : factors) {
        check_density_matrix(f, {1e-10, 1e-10, -1e-10}, "product-state factor");
        Eigen::MatrixXcd next(acc.rows() * f.rows(), acc.cols() * f.cols());
        for (Eigen::Index r = 0; r < acc.rows(); ++r) {
            for (Eigen::Index c = 0; c < acc.cols(); ++c) {
                next.block(r * f.rows(), c * f.cols(), f.rows(), f.cols()) = acc(r, c) * f;
            }
        }
        acc = std::move(next);
    }
    return JointState(std::move(acc), Unchecked{});
}

Eigen::MatrixXcd build_thermal_state(Eigen::Index n_max, InverseTemperature beta, double omega) {
    if (n_max < 1) {
        throw DomainError("thermal state needs n_max >= 1");
    }
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw DomainError("thermal state needs a finite omega > 0");
    }
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n_max + 1, n_max + 1);
    if (beta.is_zero_temperature()) {
        rho(0, 0) = 1.0;
        return rho;
    }
    const double x = beta.value() * omega;
    // Untruncated weight beyond the cutoff is exp(-x (n_max + 1)).
    const double lost = std::exp(-x * static_cast<double>(n_max + 1));
    if (lost > 1e-6) {
        throw TruncationError("Fock cutoff " + std::to_string(n_max) + " keeps only " +
                              std::to_string(1.0 - lost) + " of the thermal weight");
    }
    double total = 0.0;
    for (Eigen::Index n = 0; n <= n_max; ++n) {
        const double w = std::exp(-x * static_cast<double>(n));
        rho(n, n) = w;
        total += w;
    }
    rho /= total;
    return rho;
}

Eigen::Index auto_cutoff(const ModeSpec& mode) {
    const double nbar = thermal_occupation(mode.beta(), mode.omega());
    const double x0 = 2.0 * std::abs(mode.eta()) / mode.omega();
    return static_cast<Eigen::Index>(std::ceil(4.0 * nbar + 4.0 * x0 * x0 + 10.0));
}

double auto_time_step(const SystemSpec& spec) {
    spec.validate();
    double fastest = 0.0;
    auto term_scale = [&](const OperatorTerm& term) {
        double scale = std::abs(term.coefficient);
        for (const auto& f : term.factors) {
            if (f.subsystem < spec.spin_count()) {
                continue;
            }
            const auto n_max = static_cast<double>(spec.subsystem_dim(f.subsystem) - 1);
            switch (f.op) {
            case LocalOp::Annihilate:
            case LocalOp::Create:
                scale *= std::sqrt(n_max);
                break;
            case LocalOp::Number:
                scale *= n_max;
                break;
            case LocalOp::Custom:
                scale *= f.matrix.cwiseAbs().maxCoeff();
                break;
            default:
                break;
            }
        }
        return scale;
    };
    for (const auto& h : spec.hamiltonian) {
        fastest = std::max({fastest, std::abs(h.term.rotation), term_scale(h.term)});
    }
    for (const auto& d : spec.dissipators) {
        double amplitude = 0.0;
        for (const auto& term : d.jump) {
            amplitude += std::abs(term.coefficient);
        }
        fastest = std::max(fastest, d.rate * amplitude * amplitude);
    }
    return fastest > 0.0 ? 0.02 / fastest : 0.02;
}

SparseOperator embed(const SystemSpec& spec, const OperatorTerm& term) {
    std::vector<SparseOperator> locals;
    locals.reserve(spec.subsystem_count());
    for (std::size_t s = 0; s < spec.subsystem_count(); ++s) {
        locals.push_back(sparse_identity(spec.subsystem_dim(s)));
    }
    for (const auto& f : term.factors) {
        if (f.subsystem >= spec.subsystem_count()) {
            throw DomainError("factor refers to a missing subsystem");
        }
        const SparseOperator op = local_operator(spec.subsystem_dim(f.subsystem), f);
        locals[f.subsystem] = SparseOperator(locals[f.subsystem] * op);
    }
    SparseOperator out = locals.front();
    for (std::size_t s = 1; s < locals.size(); ++s) {
        out = sparse_kron(out, locals[s]);
    }
    out *= term.coefficient;
    return out;
}

IntegrationReport integrate(const SystemSpec& spec, const JointState& rho0,
                            std::span<const double> sample_times, const SampleObserver& observer,
                            const IntegrationOptions& options) {
    spec.validate();
    if (rho0.dimension() != spec.dimension()) {
        throw DomainError("initial state dimension does not match the system");
    }
    const Generator gen(spec);
    return propagate(gen, rho0.matrix(), true, sample_times, observer, resolve_dt(spec, options),
                     options.trace_tolerance);
}

ReducedTrajectory integrate_reduced(const SystemSpec& spec, const JointState& rho0,
                                    std::span<const double> sample_times,
                                    const IntegrationOptions& options) {
    spec.validate();
    if (rho0.dimension() != spec.dimension()) {
        throw DomainError("initial state dimension does not match the system");
    }
    const Generator gen(spec);
    const double dt = resolve_dt(spec, options);

    auto run = [&](double step) {
        std::vector<Eigen::MatrixXcd> states(sample_times.size());
        auto report = propagate(
            gen, rho0.matrix(), true, sample_times,
            [&](std::size_t i, double, const Eigen::MatrixXcd& rho) {
                states[i] = partial_trace_spin(rho, spec);
            },
            step, options.trace_tolerance);
        return std::make_pair(std::move(states), report);
    };

    auto [states, report] = run(dt);
    if (options.verify_halving) {
        const auto fine = run(0.5 * dt);
        double worst = 0.0;
        for (std::size_t i = 0; i < states.size(); ++i) {
            worst = std::max(worst, (states[i] - fine.first[i]).cwiseAbs().maxCoeff());
        }
        report.halving_difference = worst;
        if (!(worst <= options.halving_tolerance)) {
            std::ostringstream msg;
            msg << "halving dt from " << dt << " moved a reduced element by " << worst
                << " (tolerance " << options.halving_tolerance << ")";
            throw AccuracyError(msg.str());
        }
    }
    return {std::vector<double>(sample_times.begin(), sample_times.end()), std::move(states),
            report};
}

Eigen::MatrixXcd partial_trace_spin(const Eigen::MatrixXcd& rho, const SystemSpec& spec) {
    const Eigen::Index s = spec.spin_dimension();
    const Eigen::Index m = spec.mode_dimension();
    if (rho.rows() != s * m || rho.cols() != s * m) {
        throw DomainError("state dimension does not match the system");
    }
    Eigen::MatrixXcd out(s, s);
    for (Eigen::Index r = 0; r < s; ++r) {
        for (Eigen::Index c = 0; c < s; ++c) {
            out(r, c) = rho.block(r * m, c * m, m, m).trace();
        }
    }
    return out;
}

std::vector<Complex> two_time_quadrature_correlator(const SystemSpec& spec,
                                                    const Eigen::MatrixXcd& rho_thermal,
                                                    Complex eta, double omega,
                                                    std::span<const double> times,
                                                    const IntegrationOptions& options) {
    spec.validate();
    if (!spec.spin_dims.empty() || spec.mode_truncations.size() != 1) {
        throw DomainError("the quadrature correlator needs exactly one mode and no spins");
    }
    if (rho_thermal.rows() != spec.dimension() || rho_thermal.cols() != spec.dimension()) {
        throw DomainError("thermal state dimension does not match the mode cutoff");
    }
    const SparseOperator v = embed(spec, {1.0, 0.0, {{0, LocalOp::Annihilate}}});
    const SparseOperator vd = v.adjoint();
    const SparseOperator x = eta * v + std::conj(eta) * vd;

    const Generator gen(spec);
    std::vector<Complex> out(times.size());
    propagate(
        gen, x * rho_thermal, false, times,
        [&](std::size_t i, double t, const Eigen::MatrixXcd& sigma) {
            const Complex phase = std::exp(Complex(0.0, -omega * t));
            out[i] = eta * phase * trace_product(v, sigma) +
                     std::conj(eta) * std::conj(phase) * trace_product(vd, sigma);
        },
        resolve_dt(spec, options), options.trace_tolerance);
    return out;
}

} // namespace sbdyn
