// experiment.hpp — Declarative experiment configs and their runners

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sbdyn/emitter.hpp"
#include "sbdyn/oracle_models.hpp"
#include "sbdyn/spectral.hpp"
#include "sbdyn/table.hpp"
#include "sbdyn/two_spin.hpp"

namespace sbdyn {

inline constexpr int kConfigVersion = 1;
inline constexpr const char* kProgramVersion = "sbdyn 1.0.0";

/// Invalid configuration. Carries the source position when known (1-based,
/// 0 when unknown) and the dotted field path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, int column, std::string field,
                const std::string& message);
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_;
    int column_;
    std::string field_;
};

enum class OutputFormat { Csv, Json };

struct TimeGrid {
    double t_start{0.0};
    double t_end{0.0};
    int n_points{1};
    std::vector<double> points() const;
};

/// Optional one-parameter sweep. Each value produces its own output column(s).
struct Sweep {
    std::string parameter;
    std::vector<double> values;
};

enum class SpinInitial { CoherentX, Uniform };
enum class TwoSpinInitial { Triplet0, ProductX };
enum class EmitterInitial { Superposition, Excited };

struct SingleSpinExperiment {
    int two_j{1};
    SpinInitial initial{SpinInitial::CoherentX};
    std::vector<ModeSpec> modes;
    Eigen::Index row{0};
    Eigen::Index col{1};
    std::size_t sweep_mode{0};
};

struct TwoSpinExperiment {
    TwoSpinParams params;
    /// When set, both normal-mode rates follow the Debye rule from this base rate.
    std::optional<double> debye_gamma0;
};

enum class NetworkCoupling { Random, Uniform };

struct ModeNetworkExperiment {
    NetworkCoupling coupling{NetworkCoupling::Random};
    double omega0{1.0};
    /// kappa_max for random coupling, kappa for uniform coupling.
    double kappa{1e-3};
    std::vector<Eigen::Index> sizes;
    int realizations{10};
};

struct EmitterExperiment {
    EmitterParams params;
    EmitterInitial initial{EmitterInitial::Superposition};
};

enum class OracleTarget { SingleSpin, TwoSpin, Emitter };

struct OracleCompareExperiment {
    OracleTarget target{OracleTarget::SingleSpin};
    SingleSpinExperiment single;
    TwoSpinExperiment two;
    TwoSpinInitial two_initial{TwoSpinInitial::ProductX};
    EmitterExperiment emitter;
    Eigen::Index row{0};
    Eigen::Index col{1};
    ComparisonOptions options;
};

using ExperimentBody = std::variant<SingleSpinExperiment, TwoSpinExperiment,
                                    ModeNetworkExperiment, EmitterExperiment,
                                    OracleCompareExperiment>;

struct ExperimentConfig {
    std::string kind;
    ExperimentBody body;
    TimeGrid time;
    std::optional<Sweep> sweep;
    std::optional<std::string> output_path;
    OutputFormat format{OutputFormat::Csv};
    std::uint64_t seed{0};
    /// FNV-1a 64 of the config text, hex.
    std::string config_hash;
};

/// Parses and validates config text. `source` names it in diagnostics.
ExperimentConfig parse_config(const std::string& text, const std::string& source);
/// Reads and parses a file. Throws ConfigError if it cannot be read.
ExperimentConfig load_config(const std::string& path);

/// Runs the experiment. Throws the module errors on numeric failure.
Table run_experiment(const ExperimentConfig& config);

std::string render(const Table& table, OutputFormat format);

/// 64-bit FNV-1a, lower-case hex.
std::string fnv1a_hex(const std::string& bytes);

/// Directory holding the shipped presets and their names (without extension).
std::string preset_directory();
std::vector<std::string> list_presets();

} // namespace sbdyn
