// Command-line front end: run configs, list presets, validate configs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sbdyn/errors.hpp"
#include "sbdyn/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

int run_command(const std::string& path, const std::string& out, const std::string& format,
                const std::optional<std::uint64_t>& seed) {
    sbdyn::ExperimentConfig config = sbdyn::load_config(path);
    if (!format.empty()) {
        config.format = format == "json" ? sbdyn::OutputFormat::Json : sbdyn::OutputFormat::Csv;
    }
    if (seed) {
        config.seed = *seed;
    }
    const std::string text = sbdyn::render(sbdyn::run_experiment(config), config.format);
    const std::string target = !out.empty() ? out : config.output_path.value_or("");
    if (target.empty() || target == "-") {
        std::cout << text;
        return 0;
    }
    std::ofstream file(target, std::ios::binary);
    if (!file || !(file << text)) {
        std::cerr << "error: cannot write " << target << "\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact spin dephasing maps, Lindblad oracle and figure data"};
    app.set_version_flag("--version", sbdyn::kProgramVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format;
    std::uint64_t seed_value = 0;
    auto* run = app.add_subcommand("run", "Run an experiment config and write its table");
    run->add_option("config", config_path, "Experiment config (YAML)")->required();
    run->add_option("--out", out_path, "Output file ('-' for stdout); overrides output.path");
    run->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    auto* seed_opt = run->add_option("--seed", seed_value, "Base seed for random ensembles");

    auto* presets = app.add_subcommand("presets", "Shipped preset configs");
    presets->require_subcommand(1);
    auto* presets_list = presets->add_subcommand("list", "List preset names and paths");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a config without running it");
    validate->add_option("config", validate_path, "Experiment config (YAML)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) {
            std::optional<std::uint64_t> seed;
            if (*seed_opt) {
                seed = seed_value;
            }
            return run_command(config_path, out_path, format, seed);
        }
        if (*presets_list) {
            for (const auto& name : sbdyn::list_presets()) {
                std::cout << name << "\t" << sbdyn::preset_directory() << "/" << name << ".yaml\n";
            }
            return 0;
        }
        if (*validate) {
            const auto config = sbdyn::load_config(validate_path);
            std::cout << validate_path << ": ok (" << config.kind << ")\n";
            return 0;
        }
    } catch (const sbdyn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const sbdyn::ConvergenceError& e) {
        std::cerr << "numeric error: " << e.what() << " (estimate " << e.estimate() << ", error "
                  << e.error_estimate() << ")\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
