#include "sbdyn/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "sbdyn/errors.hpp"
#include "sbdyn/mode_network.hpp"
#include "sbdyn/spin_map.hpp"

#ifndef SBDYN_PRESET_DIR
#define SBDYN_PRESET_DIR "presets"
#endif

namespace sbdyn {

namespace {

std::string position_prefix(const std::string& source, int line, int column) {
    std::string out = source;
    if (line > 0) {
        out += ":" + std::to_string(line) + ":" + std::to_string(column);
    }
    return out;
}

std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

class Block;

// Parsing context: the source name for diagnostics.
struct Context {
    std::string source;

    [[noreturn]] void fail(const YAML::Node& node, const std::string& field,
                           const std::string& message) const {
        int line = 0;
        int column = 0;
        if (node.IsDefined()) {
            const YAML::Mark mark = node.Mark();
            if (mark.line >= 0) {
                line = mark.line + 1;
                column = mark.column + 1;
            }
        }
        throw ConfigError(source, line, column, field, message);
    }
};

// A YAML mapping whose keys are consumed one by one; finish() rejects leftovers.
class Block {
public:
    Block(const Context& ctx, YAML::Node node, std::string path)
        : ctx_(&ctx), node_(std::move(node)), path_(std::move(path)) {
        if (!node_.IsMap()) {
            ctx.fail(node_, path_.empty() ? "<root>" : path_, "expected a mapping");
        }
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    const YAML::Node& node() const noexcept { return node_; }
    const Context& ctx() const noexcept { return *ctx_; }

    bool has(const std::string& key) {
        known_.insert(key);
        return static_cast<bool>(node_[key]);
    }

    YAML::Node required(const std::string& key) {
        if (!has(key)) {
            ctx_->fail(node_, field(key), "missing required field");
        }
        return node_[key];
    }

    YAML::Node optional(const std::string& key) {
        known_.insert(key);
        return node_[key];
    }

    double real(const std::string& key) { return to_real(required(key), field(key)); }
    double real_or(const std::string& key, double fallback) {
        return has(key) ? real(key) : fallback;
    }

    long long integer(const std::string& key) { return to_integer(required(key), field(key)); }
    long long integer_or(const std::string& key, long long fallback) {
        return has(key) ? integer(key) : fallback;
    }

    bool boolean_or(const std::string& key, bool fallback) {
        if (!has(key)) {
            return fallback;
        }
        const YAML::Node n = node_[key];
        try {
            return n.as<bool>();
        } catch (const YAML::Exception&) {
            ctx_->fail(n, field(key), "expected true or false");
        }
    }

    std::string text(const std::string& key) { return to_text(required(key), field(key)); }
    std::string text_or(const std::string& key, const std::string& fallback) {
        return has(key) ? text(key) : fallback;
    }

    Block child(const std::string& key) { return Block(*ctx_, required(key), field(key)); }

    void finish() const {
        for (const auto& kv : node_) {
            const std::string key = kv.first.as<std::string>();
            if (!known_.count(key)) {
                ctx_->fail(kv.first, field(key), "unknown key");
            }
        }
    }

    double to_real(const YAML::Node& n, const std::string& name) const {
        if (!n.IsScalar()) {
            ctx_->fail(n, name, "expected a number");
        }
        try {
            const double v = n.as<double>();
            if (std::isnan(v)) {
                ctx_->fail(n, name, "NaN is not allowed");
            }
            return v;
        } catch (const YAML::Exception&) {
            ctx_->fail(n, name, "expected a number, got '" + n.Scalar() + "'");
        }
    }

    long long to_integer(const YAML::Node& n, const std::string& name) const {
        if (!n.IsScalar()) {
            ctx_->fail(n, name, "expected an integer");
        }
        try {
            return n.as<long long>();
        } catch (const YAML::Exception&) {
            ctx_->fail(n, name, "expected an integer, got '" + n.Scalar() + "'");
        }
    }

    std::string to_text(const YAML::Node& n, const std::string& name) const {
        if (!n.IsScalar()) {
            ctx_->fail(n, name, "expected a string");
        }
        return n.Scalar();
    }

private:
    const Context* ctx_;
    YAML::Node node_;
    std::string path_;
    std::set<std::string> known_;
};

InverseTemperature parse_beta(Block& b, const std::string& key) {
    const YAML::Node n = b.required(key);
    if (n.IsScalar()) {
        std::string s = n.Scalar();
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
        if (s == "inf" || s == ".inf" || s == "infinity") {
            return InverseTemperature::zero_temperature();
        }
    }
    const double v = b.to_real(n, b.field(key));
    try {
        return InverseTemperature::from_value(v);
    } catch (const DomainError& e) {
        b.ctx().fail(n, b.field(key), e.what());
    }
}

std::complex<double> parse_eta(Block& b) {
    const YAML::Node n = b.required("eta");
    if (n.IsSequence()) {
        if (n.size() != 2) {
            b.ctx().fail(n, b.field("eta"), "complex coupling must be [re, im]");
        }
        return {b.to_real(n[0], b.field("eta[0]")), b.to_real(n[1], b.field("eta[1]"))};
    }
    return {b.to_real(n, b.field("eta")), 0.0};
}

ModeSpec parse_mode(const Context& ctx, const YAML::Node& node, const std::string& path) {
    Block b(ctx, node, path);
    const double omega = b.real("omega");
    const auto eta = parse_eta(b);
    const double gamma = b.real_or("gamma", 0.0);
    const InverseTemperature beta = parse_beta(b, "beta");
    b.finish();
    try {
        return ModeSpec(omega, eta, gamma, beta);
    } catch (const DomainError& e) {
        ctx.fail(node, path, e.what());
    }
}

std::vector<ModeSpec> parse_modes(Block& root) {
    const YAML::Node n = root.required("modes");
    if (!n.IsSequence() || n.size() == 0) {
        root.ctx().fail(n, "modes", "expected a non-empty list of modes");
    }
    std::vector<ModeSpec> modes;
    for (std::size_t i = 0; i < n.size(); ++i) {
        modes.push_back(parse_mode(root.ctx(), n[i], "modes[" + std::to_string(i) + "]"));
    }
    return modes;
}

TimeGrid parse_time(Block& root) {
    Block b = root.child("time");
    TimeGrid g{b.real("t_start"), b.real("t_end"), static_cast<int>(b.integer("n_points"))};
    b.finish();
    if (!std::isfinite(g.t_start) || !std::isfinite(g.t_end) || g.t_start < 0.0 ||
        g.t_end < g.t_start) {
        root.ctx().fail(b.node(), "time", "need finite 0 <= t_start <= t_end");
    }
    if (g.n_points < 1 || g.n_points > 1000000) {
        root.ctx().fail(b.node()["n_points"], "time.n_points", "must be between 1 and 1000000");
    }
    return g;
}

std::optional<Sweep> parse_sweep(Block& root, const std::set<std::string>& allowed) {
    if (!root.has("sweep")) {
        return std::nullopt;
    }
    Block b = root.child("sweep");
    Sweep s{b.text("parameter"), {}};
    if (!allowed.count(s.parameter)) {
        std::string names;
        for (const auto& a : allowed) {
            names += (names.empty() ? "" : ", ") + a;
        }
        root.ctx().fail(b.node()["parameter"], "sweep.parameter",
                        "unsupported sweep parameter '" + s.parameter + "' (allowed: " + names + ")");
    }
    const YAML::Node values = b.required("values");
    if (!values.IsSequence() || values.size() == 0) {
        root.ctx().fail(values, "sweep.values", "expected a non-empty list");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        s.values.push_back(b.to_real(values[i], "sweep.values[" + std::to_string(i) + "]"));
    }
    b.finish();
    return s;
}

std::pair<Eigen::Index, Eigen::Index> parse_element(Block& root, Eigen::Index dim) {
    if (!root.has("element")) {
        return {0, 1};
    }
    const YAML::Node n = root.required("element");
    if (!n.IsSequence() || n.size() != 2) {
        root.ctx().fail(n, "element", "expected [row, column]");
    }
    const auto r = root.to_integer(n[0], "element[0]");
    const auto c = root.to_integer(n[1], "element[1]");
    if (r < 0 || c < 0 || r >= dim || c >= dim) {
        root.ctx().fail(n, "element", "index outside the " + std::to_string(dim) + "-dimensional state");
    }
    return {r, c};
}

SingleSpinExperiment parse_single_spin(Block& root) {
    SingleSpinExperiment e;
    Block spin = root.child("spin");
    e.two_j = static_cast<int>(spin.integer("two_j"));
    if (e.two_j < 1 || e.two_j > 200) {
        root.ctx().fail(spin.node()["two_j"], "spin.two_j", "must be between 1 and 200");
    }
    const std::string initial = spin.text_or("initial", "coherent_x");
    if (initial == "coherent_x") {
        e.initial = SpinInitial::CoherentX;
    } else if (initial == "uniform") {
        e.initial = SpinInitial::Uniform;
    } else {
        root.ctx().fail(spin.node()["initial"], "spin.initial",
                        "expected coherent_x or uniform, got '" + initial + "'");
    }
    e.sweep_mode = static_cast<std::size_t>(spin.integer_or("sweep_mode", 0));
    spin.finish();
    e.modes = parse_modes(root);
    if (e.sweep_mode >= e.modes.size()) {
        root.ctx().fail(spin.node(), "spin.sweep_mode", "no such mode");
    }
    std::tie(e.row, e.col) = parse_element(root, e.two_j + 1);
    return e;
}

TwoSpinParams parse_two_spin_params(Block& b) {
    TwoSpinParams p;
    p.omega0 = b.real_or("omega0", 1.0);
    p.kappa = b.real_or("kappa", 0.0);
    p.eta = b.real("eta");
    p.gamma_plus = b.real_or("gamma_plus", 0.0);
    p.gamma_minus = b.real_or("gamma_minus", 0.0);
    p.beta = parse_beta(b, "beta");
    return p;
}

TwoSpinExperiment parse_two_spin(Block& root) {
    Block b = root.child("two_spin");
    TwoSpinExperiment e{parse_two_spin_params(b), std::nullopt};
    if (b.has("debye_gamma0")) {
        e.debye_gamma0 = b.real("debye_gamma0");
    }
    b.finish();
    return e;
}

// Applies the Debye rule when requested. The symmetric rate only matters for
// the full map, so a non-positive symmetric frequency leaves it at zero.
TwoSpinParams resolved_two_spin(const TwoSpinExperiment& e) {
    TwoSpinParams p = e.params;
    if (e.debye_gamma0) {
        p.gamma_minus = debye_rate(*e.debye_gamma0, p.omega0, p.omega0 - 2.0 * p.kappa);
        const double omega_plus = p.omega0 + 2.0 * p.kappa;
        p.gamma_plus = omega_plus > 0.0 ? debye_rate(*e.debye_gamma0, p.omega0, omega_plus) : 0.0;
    }
    return p;
}

TwoSpinParams with_two_spin_sweep(TwoSpinExperiment e, const std::string& parameter, double v) {
    if (parameter == "gamma_minus") {
        e.params.gamma_minus = v;
    } else if (parameter == "gamma_plus") {
        e.params.gamma_plus = v;
    } else if (parameter == "kappa") {
        e.params.kappa = v;
    } else if (parameter == "eta") {
        e.params.eta = v;
    }
    return resolved_two_spin(e);
}

std::vector<ModeSpec> with_mode_sweep(std::vector<ModeSpec> modes, std::size_t index,
                                      const std::string& parameter, double v) {
    ModeSpec& m = modes[index];
    if (parameter == "gamma") {
        m = m.with_gamma(v);
    } else if (parameter == "eta") {
        m = m.with_eta(v);
    } else if (parameter == "omega") {
        m = ModeSpec(v, m.eta(), m.gamma(), m.beta());
    } else if (parameter == "beta") {
        m = ModeSpec(m.omega(), m.eta(), m.gamma(), InverseTemperature::from_value(v));
    }
    return modes;
}

EmitterExperiment parse_emitter(Block& root) {
    EmitterExperiment e;
    Block b = root.child("emitter");
    e.params.gamma_op = b.real_or("gamma_op", 0.0);
    e.params.gamma_dp = b.real_or("gamma_dp", 0.0);
    const std::string initial = b.text_or("initial", "superposition");
    if (initial == "superposition") {
        e.initial = EmitterInitial::Superposition;
    } else if (initial == "excited") {
        e.initial = EmitterInitial::Excited;
    } else {
        root.ctx().fail(b.node()["initial"], "emitter.initial",
                        "expected superposition or excited, got '" + initial + "'");
    }
    if (!(e.params.gamma_op >= 0.0) || !(e.params.gamma_dp >= 0.0) ||
        !std::isfinite(e.params.gamma_op) || !std::isfinite(e.params.gamma_dp)) {
        root.ctx().fail(b.node(), "emitter", "gamma_op and gamma_dp must be finite and >= 0");
    }
    b.finish();
    e.params.modes = parse_modes(root);
    return e;
}

ModeNetworkExperiment parse_network(Block& root) {
    ModeNetworkExperiment e;
    Block b = root.child("network");
    const std::string coupling = b.text_or("coupling", "random");
    if (coupling == "random") {
        e.coupling = NetworkCoupling::Random;
        e.kappa = b.real("kappa_max");
    } else if (coupling == "uniform") {
        e.coupling = NetworkCoupling::Uniform;
        e.kappa = b.real("kappa");
    } else {
        root.ctx().fail(b.node()["coupling"], "network.coupling",
                        "expected random or uniform, got '" + coupling + "'");
    }
    e.omega0 = b.real_or("omega0", 1.0);
    e.realizations = static_cast<int>(b.integer_or("realizations", 10));
    const YAML::Node sizes = b.required("sizes");
    if (!sizes.IsSequence() || sizes.size() == 0) {
        root.ctx().fail(sizes, "network.sizes", "expected a non-empty list of mode counts");
    }
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const auto n = b.to_integer(sizes[i], "network.sizes[" + std::to_string(i) + "]");
        if (n < 2 || n > 5000) {
            root.ctx().fail(sizes[i], "network.sizes[" + std::to_string(i) + "]",
                            "mode count must be between 2 and 5000");
        }
        e.sizes.push_back(n);
    }
    if (e.realizations < 1) {
        root.ctx().fail(b.node()["realizations"], "network.realizations", "must be >= 1");
    }
    if (e.coupling == NetworkCoupling::Random && !(e.kappa >= 0.0)) {
        root.ctx().fail(b.node()["kappa_max"], "network.kappa_max", "must be >= 0");
    }
    b.finish();
    // Uniform couplings are checked for positivity at load.
    if (e.coupling == NetworkCoupling::Uniform) {
        for (auto n : e.sizes) {
            try {
                build_uniform_coupling(n, e.kappa, e.omega0);
            } catch (const DomainError& err) {
                root.ctx().fail(b.node(), "network", err.what());
            }
        }
    }
    return e;
}

ComparisonOptions parse_oracle_options(Block& root) {
    ComparisonOptions o;
    if (!root.has("oracle")) {
        return o;
    }
    Block b = root.child("oracle");
    o.n_max = b.integer_or("n_max", 0);
    o.truncation_gate = b.boolean_or("truncation_gate", true);
    o.gate_tolerance = b.real_or("gate_tolerance", 1e-4);
    o.integration.dt = b.real_or("dt", 0.0);
    o.integration.verify_halving = b.boolean_or("verify_halving", false);
    o.integration.halving_tolerance = b.real_or("halving_tolerance", 1e-6);
    b.finish();
    if (o.n_max < 0 || o.n_max > 400) {
        root.ctx().fail(b.node()["n_max"], "oracle.n_max", "must be between 0 (auto) and 400");
    }
    return o;
}

OracleCompareExperiment parse_oracle_compare(Block& root) {
    OracleCompareExperiment e;
    const std::string target = root.text("target");
    Eigen::Index dim = 2;
    if (target == "single-spin") {
        e.target = OracleTarget::SingleSpin;
        Block spin = root.child("spin");
        e.single.two_j = static_cast<int>(spin.integer("two_j"));
        if (e.single.two_j < 1 || e.single.two_j > 10) {
            root.ctx().fail(spin.node()["two_j"], "spin.two_j", "oracle comparisons need 1 <= two_j <= 10");
        }
        const std::string initial = spin.text_or("initial", "coherent_x");
        if (initial == "uniform") {
            e.single.initial = SpinInitial::Uniform;
        } else if (initial != "coherent_x") {
            root.ctx().fail(spin.node()["initial"], "spin.initial",
                            "expected coherent_x or uniform, got '" + initial + "'");
        }
        spin.finish();
        e.single.modes = parse_modes(root);
        dim = e.single.two_j + 1;
    } else if (target == "two-spin") {
        e.target = OracleTarget::TwoSpin;
        e.two = parse_two_spin(root);
        const std::string initial = root.text_or("initial", "product_x");
        if (initial == "triplet0") {
            e.two_initial = TwoSpinInitial::Triplet0;
        } else if (initial != "product_x") {
            root.ctx().fail(root.node()["initial"], "initial",
                            "expected product_x or triplet0, got '" + initial + "'");
        }
        try {
            const TwoSpinParams p = resolved_two_spin(e.two);
            normal_mode_frequencies(p);
            symmetric_mode(p);
            antisymmetric_mode(p);
        } catch (const DomainError& err) {
            root.ctx().fail(root.node()["two_spin"], "two_spin", err.what());
        }
        dim = 4;
    } else if (target == "emitter") {
        e.target = OracleTarget::Emitter;
        e.emitter = parse_emitter(root);
    } else {
        root.ctx().fail(root.node()["target"], "target",
                        "expected single-spin, two-spin or emitter, got '" + target + "'");
    }
    std::tie(e.row, e.col) = parse_element(root, dim);
    e.options = parse_oracle_options(root);
    return e;
}

Eigen::Matrix4cd two_spin_initial(TwoSpinInitial which) {
    if (which == TwoSpinInitial::Triplet0) {
        return coupled_projector(CoupledState::Triplet_0);
    }
    const Eigen::Vector4cd psi = Eigen::Vector4cd::Constant(0.5);
    return psi * psi.adjoint();
}

EmitterState emitter_initial(EmitterInitial which) {
    EmitterState rho = EmitterState::Zero();
    if (which == EmitterInitial::Excited) {
        rho(1, 1) = 1.0;
    } else {
        rho.setConstant(0.5);
    }
    return rho;
}

SpinDensityMatrix spin_initial(int two_j, SpinInitial which) {
    return which == SpinInitial::CoherentX ? SpinDensityMatrix::coherent_x(two_j)
                                           : SpinDensityMatrix::uniform_superposition(two_j);
}

std::string sweep_suffix(const std::optional<Sweep>& sweep, double v) {
    return sweep ? "@" + sweep->parameter + "=" + short_number(v) : "";
}

std::vector<double> sweep_values(const std::optional<Sweep>& sweep) {
    return sweep ? sweep->values : std::vector<double>{std::numeric_limits<double>::quiet_NaN()};
}

Table base_table(const ExperimentConfig& config) {
    Table t;
    t.meta = {{"program", kProgramVersion},
              {"schema_version", std::to_string(kConfigVersion)},
              {"kind", config.kind},
              {"config_hash", config.config_hash}};
    return t;
}

Table run_single_spin(const ExperimentConfig& config, const SingleSpinExperiment& e) {
    Table table = base_table(config);
    const auto times = config.time.points();
    const SpinDensityMatrix rho0 = spin_initial(e.two_j, e.initial);
    table.columns.push_back("t");
    std::vector<std::vector<ModeSpec>> variants;
    for (double v : sweep_values(config.sweep)) {
        variants.push_back(config.sweep ? with_mode_sweep(e.modes, e.sweep_mode, config.sweep->parameter, v)
                                        : e.modes);
        table.columns.push_back("abs_rho_" + std::to_string(e.row) + "_" + std::to_string(e.col) +
                                sweep_suffix(config.sweep, v));
    }
    for (double t : times) {
        std::vector<double> row{t};
        for (const auto& modes : variants) {
            row.push_back(coherence_magnitude(evolve_spin(rho0, modes, t), e.row, e.col));
        }
        table.add_row(std::move(row));
    }
    return table;
}

Table run_two_spin(const ExperimentConfig& config, const TwoSpinExperiment& e) {
    Table table = base_table(config);
    const auto times = config.time.points();
    table.columns.push_back("t");
    std::vector<TwoSpinParams> variants;
    for (double v : sweep_values(config.sweep)) {
        variants.push_back(config.sweep ? with_two_spin_sweep(e, config.sweep->parameter, v)
                                        : resolved_two_spin(e));
        const std::string suffix = sweep_suffix(config.sweep, v);
        table.columns.push_back("p10" + suffix);
        table.columns.push_back("p00" + suffix);
        table.columns.push_back("overlap" + suffix);
    }
    for (double t : times) {
        std::vector<double> row{t};
        for (const auto& p : variants) {
            const ProjectorPopulation pop = symmetric_projector_population(p, t);
            row.push_back(pop.p_keep);
            row.push_back(pop.p_leak);
            row.push_back(symmetric_overlap(p, t));
        }
        table.add_row(std::move(row));
    }
    return table;
}

Table run_mode_network(const ExperimentConfig& config, const ModeNetworkExperiment& e) {
    Table table = base_table(config);
    table.meta.emplace_back("seed", std::to_string(config.seed));
    table.columns = {"N",          "realization",    "lambda1", "lambda2",
                     "lambda_max", "gap",            "fidelity_error",
                     "fk_lambda1", "fk_gap",         "fk_fidelity_bound"};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (auto n : e.sizes) {
        const bool random = e.coupling == NetworkCoupling::Random;
        const int count = random ? e.realizations : 1;
        FkPredictions fk{nan, nan, nan};
        const double mu = random ? -0.5 * e.kappa : e.kappa;
        const double sigma = random ? e.kappa / std::sqrt(12.0) : 0.0;
        if (mu < 0.0) {
            fk = fk_predictions(n, mu, sigma, e.omega0);
        }
        for (int r = 0; r < count; ++r) {
            const CouplingMatrix cm =
                random ? build_random_coupling(n, e.kappa, e.omega0,
                                               derive_seed(derive_seed(config.seed, static_cast<std::uint64_t>(n)),
                                                           static_cast<std::uint64_t>(r)))
                       : build_uniform_coupling(n, e.kappa, e.omega0);
            const NormalModeDecomposition d = decompose(cm);
            table.add_row({static_cast<double>(n), static_cast<double>(r), d.eigenvalues(0),
                           d.eigenvalues(1), d.eigenvalues(n - 1), d.gap(),
                           d.symmetric_fidelity ? 1.0 - *d.symmetric_fidelity : nan,
                           fk.lambda1_estimate, fk.expected_gap, fk.fidelity_error_bound});
        }
    }
    return table;
}

Table run_emitter(const ExperimentConfig& config, const EmitterExperiment& e) {
    Table table = base_table(config);
    table.columns = {"t", "rho_gg", "rho_ee", "re_rho_ge", "im_rho_ge", "abs_rho_ge"};
    const EmitterState rho0 = emitter_initial(e.initial);
    for (double t : config.time.points()) {
        const EmitterState rho = evolve_emitter(rho0, e.params, t);
        table.add_row({t, rho(0, 0).real(), rho(1, 1).real(), rho(0, 1).real(), rho(0, 1).imag(),
                       std::abs(rho(0, 1))});
    }
    return table;
}

Table run_oracle_compare(const ExperimentConfig& config, const OracleCompareExperiment& e) {
    Table table = base_table(config);
    const auto times = config.time.points();
    Comparison cmp = [&] {
        switch (e.target) {
        case OracleTarget::SingleSpin:
            return compare_single_spin(spin_initial(e.single.two_j, e.single.initial), e.single.modes,
                                       times, e.options);
        case OracleTarget::TwoSpin:
            return compare_two_spin(TwoSpinDensityMatrix(two_spin_initial(e.two_initial)),
                                    resolved_two_spin(e.two), times, e.options);
        case OracleTarget::Emitter:
            break;
        }
        return compare_emitter(emitter_initial(e.emitter.initial), e.emitter.params, times, e.options);
    }();
    std::string cutoffs;
    for (auto n : cmp.n_max) {
        cutoffs += (cutoffs.empty() ? "" : ";") + std::to_string(n);
    }
    table.meta.emplace_back("n_max", cutoffs);
    table.meta.emplace_back("dt", format_number(cmp.report.dt));
    table.meta.emplace_back("element", std::to_string(e.row) + ";" + std::to_string(e.col));
    table.columns = {"t",         "analytic_re", "analytic_im",         "oracle_re",
                     "oracle_im", "abs_diff",    "max_elementwise_diff"};
    for (std::size_t i = 0; i < times.size(); ++i) {
        const Complex a = cmp.analytic[i](e.row, e.col);
        const Complex o = cmp.oracle[i](e.row, e.col);
        table.add_row({times[i], a.real(), a.imag(), o.real(), o.imag(), std::abs(a - o),
                       (cmp.analytic[i] - cmp.oracle[i]).cwiseAbs().maxCoeff()});
    }
    table.footer.emplace_back("truncation_difference", cmp.truncation_difference);
    table.footer.emplace_back("max_abs_diff", cmp.max_deviation);
    return table;
}

} // namespace

ConfigError::ConfigError(const std::string& source, int line, int column, std::string field,
                         const std::string& message)
    : std::runtime_error(position_prefix(source, line, column) + ": " +
                         (field.empty() ? "" : "field '" + field + "': ") + message),
      line_(line), column_(column), field_(std::move(field)) {}

std::vector<double> TimeGrid::points() const {
    std::vector<double> out(static_cast<std::size_t>(n_points));
    if (n_points == 1) {
        out[0] = t_start;
        return out;
    }
    const double step = (t_end - t_start) / static_cast<double>(n_points - 1);
    for (int i = 0; i < n_points; ++i) {
        out[static_cast<std::size_t>(i)] = t_start + step * static_cast<double>(i);
    }
    out.back() = t_end;
    return out;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    const Context ctx{source};
    YAML::Node doc;
    try {
        doc = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source, e.mark.line + 1, e.mark.column + 1, "", e.msg);
    }
    if (!doc.IsDefined() || doc.IsNull()) {
        throw ConfigError(source, 0, 0, "", "empty configuration");
    }
    Block root(ctx, doc, "");

    ExperimentConfig config;
    config.config_hash = fnv1a_hex(text);
    const auto version = root.integer("version");
    if (version != kConfigVersion) {
        ctx.fail(doc["version"], "version",
                 "unsupported schema version " + std::to_string(version) + " (expected 1)");
    }
    config.kind = root.text("kind");
    if (root.has("seed")) {
        const auto seed = root.integer("seed");
        if (seed < 0) {
            ctx.fail(doc["seed"], "seed", "must be >= 0");
        }
        config.seed = static_cast<std::uint64_t>(seed);
    }
    if (root.has("output")) {
        Block out = root.child("output");
        if (out.has("path")) {
            config.output_path = out.text("path");
        }
        const std::string format = out.text_or("format", "csv");
        if (format == "csv") {
            config.format = OutputFormat::Csv;
        } else if (format == "json") {
            config.format = OutputFormat::Json;
        } else {
            ctx.fail(out.node()["format"], "output.format", "expected csv or json, got '" + format + "'");
        }
        out.finish();
    }

    if (config.kind == "single-spin") {
        config.time = parse_time(root);
        config.body = parse_single_spin(root);
        config.sweep = parse_sweep(root, {"gamma", "eta", "omega", "beta"});
        if (config.sweep) {
            const auto& e = std::get<SingleSpinExperiment>(config.body);
            for (double v : config.sweep->values) {
                try {
                    with_mode_sweep(e.modes, e.sweep_mode, config.sweep->parameter, v);
                } catch (const DomainError& err) {
                    ctx.fail(doc["sweep"], "sweep.values", err.what());
                }
            }
        }
    } else if (config.kind == "two-spin") {
        config.time = parse_time(root);
        const TwoSpinExperiment e = parse_two_spin(root);
        config.body = e;
        config.sweep = parse_sweep(root, {"gamma_minus", "gamma_plus", "kappa", "eta"});
        for (double v : sweep_values(config.sweep)) {
            try {
                const TwoSpinParams p = config.sweep ? with_two_spin_sweep(e, config.sweep->parameter, v)
                                                     : resolved_two_spin(e);
                antisymmetric_mode(p);
                if (p.gamma_plus < 0.0 || !std::isfinite(p.gamma_plus)) {
                    throw DomainError("gamma_plus must be finite and >= 0");
                }
            } catch (const DomainError& err) {
                ctx.fail(doc["two_spin"], "two_spin", err.what());
            }
        }
    } else if (config.kind == "mode-network") {
        config.body = parse_network(root);
    } else if (config.kind == "emitter") {
        config.time = parse_time(root);
        config.body = parse_emitter(root);
    } else if (config.kind == "oracle-compare") {
        config.time = parse_time(root);
        config.body = parse_oracle_compare(root);
    } else {
        ctx.fail(doc["kind"], "kind",
                 "unknown experiment kind '" + config.kind +
                     "' (expected single-spin, two-spin, mode-network, emitter or oracle-compare)");
    }
    root.finish();
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError(path, 0, 0, "", "cannot open configuration file");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path);
}

Table run_experiment(const ExperimentConfig& config) {
    return std::visit(
        [&](const auto& body) -> Table {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, SingleSpinExperiment>) {
                return run_single_spin(config, body);
            } else if constexpr (std::is_same_v<T, TwoSpinExperiment>) {
                return run_two_spin(config, body);
            } else if constexpr (std::is_same_v<T, ModeNetworkExperiment>) {
                return run_mode_network(config, body);
            } else if constexpr (std::is_same_v<T, EmitterExperiment>) {
                return run_emitter(config, body);
            } else {
                return run_oracle_compare(config, body);
            }
        },
        config.body);
}

std::string render(const Table& table, OutputFormat format) {
    return format == OutputFormat::Json ? to_json(table) : to_csv(table);
}

std::string preset_directory() { return SBDYN_PRESET_DIR; }

std::vector<std::string> list_presets() {
    std::vector<std::string> names;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(preset_directory(), ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".yaml") {
            names.push_back(entry.path().stem().string());
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

} // namespace sbdyn
