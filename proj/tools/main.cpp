#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "loadcast/error.hpp"

namespace {

using loadcast::cli::Overrides;

struct CommonFlags {
    std::string config_path;
    Overrides overrides;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "config file (TOML-style sections)");
    cmd->add_option("--seed", flags.overrides.seed, "master random seed (required)");
    cmd->add_option("--out-dir", flags.overrides.out_dir, "output directory");
    cmd->add_option("--data", flags.overrides.data, "input CSV path, or 'synthetic'");
    cmd->add_option("--schema", flags.overrides.schema,
                    "column mapping, e.g. ts=timestamp,load=load[,features=a+b]");
    cmd->add_option("--epoch-budget", flags.overrides.epoch_budget,
                    "cap epochs per training run (0 honors the hyperparameters)");
    cmd->add_option("--days", flags.overrides.days, "synthetic series length in days");
    cmd->add_option("--data-seed", flags.overrides.data_seed, "synthetic generator noise seed");
    cmd->add_option("--variant", flags.overrides.variant,
                    "a2clnet | vanilla-cnn | vanilla-lstm | hybrid-cnn-lstm");
    cmd->add_option("--threads", flags.overrides.threads, "gradient workers per batch");
}

void add_hyperparams(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--lr", flags.overrides.learning_rate, "learning rate");
    cmd->add_option("--batch-size", flags.overrides.batch_size, "mini-batch size");
    cmd->add_option("--epochs", flags.overrides.epochs, "training epochs");
    cmd->add_option("--init-scheme", flags.overrides.init_scheme, "xavier | he | random");
    cmd->add_option("--loss-metric", flags.overrides.loss_metric, "mse | cross-entropy | mape");
    cmd->add_option("--hp-from", flags.overrides.hp_from,
                    "JSON file with hyperparameters (e.g. best_hp.json)");
}

void add_swarm(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--swarm-size", flags.overrides.swarm_size, "particles in the swarm");
    cmd->add_option("--iterations", flags.overrides.iterations, "search iterations");
}

int exit_code_for(const loadcast::Error& e) {
    switch (e.kind()) {
        case loadcast::ErrorKind::config:
        case loadcast::ErrorKind::input:
            return 1;
        case loadcast::ErrorKind::data:
        case loadcast::ErrorKind::domain:
        case loadcast::ErrorKind::io:
        case loadcast::ErrorKind::version:
        case loadcast::ErrorKind::corrupt:
        case loadcast::ErrorKind::shape:
            return 2;
        case loadcast::ErrorKind::internal:
            return 3;
    }
    return 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"short-term electricity load forecasting toolkit"};
    app.require_subcommand(1);

    CommonFlags synth, search, trainf, eval, fore, comp;
    std::string checkpoint_path, split = "test";

    auto* cmd_synth = app.add_subcommand("synth-data", "generate the synthetic benchmark CSV");
    add_common(cmd_synth, synth);

    auto* cmd_search =
        app.add_subcommand("pso-search", "tune hyperparameters with particle swarm optimization");
    add_common(cmd_search, search);
    add_hyperparams(cmd_search, search);  // present so accidental use fails loudly
    add_swarm(cmd_search, search);

    auto* cmd_train = app.add_subcommand("train", "train a model and write a checkpoint");
    add_common(cmd_train, trainf);
    add_hyperparams(cmd_train, trainf);
    add_swarm(cmd_train, trainf);
    cmd_train->add_flag("--pso", [&](std::size_t) { trainf.overrides.pso = true; },
                        "run the hyperparameter search first, then train with its pick");

    auto* cmd_eval = app.add_subcommand("evaluate", "score a checkpoint on a dataset split");
    add_common(cmd_eval, eval);
    cmd_eval->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
    cmd_eval->add_option("--split", split, "train | val | test (default test)");

    auto* cmd_fore =
        app.add_subcommand("forecast", "predict the next step from a recent-window CSV");
    add_common(cmd_fore, fore);
    cmd_fore->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();

    auto* cmd_comp =
        app.add_subcommand("compare", "score every model variant plus the persistence baseline");
    add_common(cmd_comp, comp);
    add_hyperparams(cmd_comp, comp);
    add_swarm(cmd_comp, comp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // user error, per the exit-code contract
    }

    try {
        using loadcast::cli::load_run_config;
        if (cmd_synth->parsed()) {
            loadcast::cli::cmd_synth_data(load_run_config(synth.config_path, synth.overrides));
        } else if (cmd_search->parsed()) {
            loadcast::cli::cmd_pso_search(load_run_config(search.config_path, search.overrides));
        } else if (cmd_train->parsed()) {
            loadcast::cli::cmd_train(load_run_config(trainf.config_path, trainf.overrides));
        } else if (cmd_eval->parsed()) {
            loadcast::cli::cmd_evaluate(load_run_config(eval.config_path, eval.overrides),
                                        checkpoint_path, split);
        } else if (cmd_fore->parsed()) {
            loadcast::cli::cmd_forecast(load_run_config(fore.config_path, fore.overrides),
                                        checkpoint_path);
        } else if (cmd_comp->parsed()) {
            loadcast::cli::cmd_compare(load_run_config(comp.config_path, comp.overrides));
        }
        return 0;
    } catch (const loadcast::Error& e) {
        std::cerr << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
