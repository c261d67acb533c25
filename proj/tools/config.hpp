#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "loadcast/model.hpp"
#include "loadcast/pso.hpp"
#include "loadcast/training.hpp"

namespace loadcast::cli {

/// Everything a command run needs, merged from the config file and flags.
/// The seed is mandatory and never defaulted from the clock: identical
/// (config, flags, input files) must mean identical outputs.
struct RunConfig {
    // [data]
    std::string data_path;  // CSV path; the literal "synthetic" selects the generator
    bool synthetic = false;
    std::size_t synthetic_days = 60;
    std::uint64_t data_seed = 1234;  // generator noise seed, independent of the run seed
    std::string schema = "ts=timestamp,load=load";

    // [model]
    model::ArchitectureConfig arch;

    // [train]
    bool explicit_hp = false;  // any hyperparameter was given explicitly
    train::HyperParams hp;
    std::string hp_from;  // JSON file with hyperparameters (e.g. a search's best_hp.json)

    // [pso]
    bool pso_mode = false;
    pso::SwarmConfig swarm;

    // [run]
    bool has_seed = false;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    std::size_t epoch_budget = 0;  // 0 honors hp.epochs
    int threads = 1;
};

/// Command-line values; only fields the user actually passed are set, so
/// flags can override the config file selectively.
struct Overrides {
    std::optional<std::string> data;
    std::optional<std::string> schema;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> epoch_budget;
    std::optional<std::size_t> days;
    std::optional<std::uint64_t> data_seed;
    std::optional<std::string> variant;
    std::optional<double> learning_rate;
    std::optional<std::size_t> batch_size;
    std::optional<std::size_t> epochs;
    std::optional<std::string> init_scheme;
    std::optional<std::string> loss_metric;
    std::optional<std::string> hp_from;
    std::optional<bool> pso;
    std::optional<std::size_t> swarm_size;
    std::optional<std::size_t> iterations;
    std::optional<int> threads;
};

/// Parses the TOML-style config file (sections [data], [model], [train],
/// [pso], [run]; `key = value` lines; # comments), applies flag overrides,
/// and validates cross-field rules: the seed must be present, and pso mode
/// excludes explicit hyperparameters.
RunConfig load_run_config(const std::string& config_path, const Overrides& overrides);

}  // namespace loadcast::cli
