#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "loadcast/checkpoint.hpp"
#include "loadcast/dataio.hpp"
#include "loadcast/error.hpp"
#include "loadcast/metrics.hpp"
#include "svg.hpp"

namespace loadcast::cli {

namespace {

std::string out_path(const RunConfig& cfg, const std::string& name) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw errors::io("cannot create output directory '" + cfg.out_dir + "'");
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw errors::io("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw errors::io("failed while writing '" + path + "'");
}

data::LoadSeries load_series(const RunConfig& cfg, data::IngestReport* report = nullptr) {
    if (cfg.synthetic) {
        return data::synthetic_load(cfg.synthetic_days, cfg.data_seed);
    }
    if (cfg.data_path.empty()) {
        throw errors::config("no dataset configured; pass --data <csv> or --data synthetic");
    }
    return data::ingest_csv(cfg.data_path, data::schema_from_string(cfg.schema), report);
}

data::WindowedDataset prepare_dataset(const RunConfig& cfg) {
    data::IngestReport report;
    const auto series = load_series(cfg, &report);
    if (!report.note.empty()) std::cout << report.note << "\n";
    auto ds = data::build_dataset(series, cfg.arch.lookback_window);
    if (ds.features != cfg.arch.input_features) {
        throw errors::config("the dataset provides " + std::to_string(ds.features) +
                             " feature(s) per step but the model is configured for " +
                             std::to_string(cfg.arch.input_features) +
                             "; adjust [model] input_features or the column schema");
    }
    return ds;
}

std::string hp_json(const train::HyperParams& hp) {
    nlohmann::ordered_json j = {{"learning_rate", hp.learning_rate},
                                {"batch_size", hp.batch_size},
                                {"epochs", hp.epochs},
                                {"init_scheme", to_string(hp.init_scheme)},
                                {"loss_metric", train::to_string(hp.loss_metric)}};
    return j.dump(2) + "\n";
}

train::HyperParams hp_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw errors::io("cannot open hyperparameter file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
        train::HyperParams hp;
        hp.learning_rate = j.at("learning_rate").get<double>();
        hp.batch_size = j.at("batch_size").get<std::size_t>();
        hp.epochs = j.at("epochs").get<std::size_t>();
        hp.init_scheme = init_scheme_from_name(j.at("init_scheme").get<std::string>());
        hp.loss_metric = train::loss_metric_from_name(j.at("loss_metric").get<std::string>());
        return hp;
    } catch (const nlohmann::json::exception& e) {
        throw errors::config("hyperparameter file '" + path + "' is malformed: " + e.what());
    }
}

pso::SearchResult run_search(const RunConfig& cfg, const data::WindowedDataset& ds) {
    pso::FitnessContext ctx;
    ctx.dataset = &ds;
    ctx.arch = cfg.arch;
    ctx.epoch_budget = cfg.epoch_budget;
    ctx.train_seed = cfg.seed;
    ctx.threads = cfg.threads;

    pso::SwarmConfig sw = cfg.swarm;
    sw.seed = cfg.seed;

    const auto space = pso::hyperparameter_space();
    return pso::optimize(
        space, [&](const train::HyperParams& hp) { return pso::fitness_of_hyperparams(hp, ctx); },
        sw);
}

void write_search_artifacts(const RunConfig& cfg, const pso::SearchResult& result) {
    write_text(out_path(cfg, "best_hp.json"), hp_json(result.best));
    write_text(out_path(cfg, "search_summary.json"), pso::to_json(result));
    write_text(out_path(cfg, "history.csv"),
               pso::history_csv(result.history, pso::hyperparameter_space()));
    write_text(out_path(cfg, "convergence.svg"),
               svg::line_plot("hyperparameter search convergence",
                              {{"best validation MSE", result.gbest_trace}}, "iteration",
                              "validation MSE"));
}

/// Hyperparameters for a training-style command: an explicit set (validated),
/// a JSON file, or the documented defaults.
train::HyperParams resolve_hp(const RunConfig& cfg) {
    train::HyperParams hp = cfg.hp;
    if (!cfg.hp_from.empty()) hp = hp_from_json_file(cfg.hp_from);
    hp.validate();
    return hp;
}

struct TrainedModel {
    model::Model m;
    train::TrainReport report;
};

TrainedModel train_model(const RunConfig& cfg, const data::WindowedDataset& ds,
                         const train::HyperParams& hp, model::Variant variant) {
    model::ArchitectureConfig arch = cfg.arch;
    arch.variant = variant;
    Rng rng(cfg.seed);
    TrainedModel out{train::build_for_loss(arch, hp, rng), {}};
    train::TrainOptions opts;
    opts.epoch_override = cfg.epoch_budget;
    opts.threads = cfg.threads;
    out.report = train::train(out.m, ds, hp, rng, opts);
    return out;
}

metrics::EvalReport evaluate_split(const model::Model& m, const data::WindowedDataset& ds,
                                   std::pair<std::size_t, std::size_t> range) {
    if (range.first >= range.second) {
        throw errors::data("the requested split has no windows; the dataset is too short");
    }
    const auto preds = train::predict_range(m, ds, range);
    std::vector<double> y(preds.size()), yhat(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
        y[i] = ds.stats.denorm_load(ds.y[range.first + i]);
        yhat[i] = ds.stats.denorm_load(preds[i]);
    }
    return metrics::evaluate(y, yhat);
}

metrics::EvalReport evaluate_persistence(const data::WindowedDataset& ds,
                                         std::pair<std::size_t, std::size_t> range) {
    if (range.first >= range.second) {
        throw errors::data("the requested split has no windows; the dataset is too short");
    }
    const auto preds = data::persistence_forecast(ds, range);
    std::vector<double> y(preds.size()), yhat(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
        y[i] = ds.stats.denorm_load(ds.y[range.first + i]);
        yhat[i] = ds.stats.denorm_load(preds[i]);
    }
    return metrics::evaluate(y, yhat);
}

}  // namespace

void cmd_synth_data(const RunConfig& cfg) {
    const auto series = data::synthetic_load(cfg.synthetic_days, cfg.seed);
    const auto path = out_path(cfg, "synthetic.csv");
    data::write_csv(series, path);
    std::cout << "wrote " << path << " (" << series.size() << " hourly rows, "
              << cfg.synthetic_days << " days)\n";
}

void cmd_pso_search(const RunConfig& cfg) {
    if (cfg.explicit_hp) {
        throw errors::config(
            "pso-search selects the hyperparameters itself; remove the explicit "
            "hyperparameter settings");
    }
    const auto ds = prepare_dataset(cfg);
    const auto result = run_search(cfg, ds);
    write_search_artifacts(cfg, result);

    char line[160];
    std::snprintf(line, sizeof(line),
                  "search finished: best validation MSE %.6g after %zu iterations (%zu "
                  "evaluations)\n",
                  result.best_fitness, result.iterations_run, result.history.size());
    std::cout << line << "best hyperparameters written to " << out_path(cfg, "best_hp.json")
              << "\n";
}

void cmd_train(const RunConfig& cfg) {
    const auto ds = prepare_dataset(cfg);

    train::HyperParams hp;
    if (cfg.pso_mode) {
        const auto result = run_search(cfg, ds);
        write_search_artifacts(cfg, result);
        hp = result.best;
        std::cout << "search picked lr=" << hp.learning_rate << " batch=" << hp.batch_size
                  << " epochs=" << hp.epochs << " init=" << to_string(hp.init_scheme)
                  << " loss=" << train::to_string(hp.loss_metric) << "\n";
    } else {
        hp = resolve_hp(cfg);
    }

    auto trained = train_model(cfg, ds, hp, cfg.arch.variant);
    ckpt::save_checkpoint(out_path(cfg, "checkpoint.json"), trained.m, hp, ds.stats, cfg.seed);
    write_text(out_path(cfg, "train_report.json"), train::to_json(trained.report, false));
    write_text(out_path(cfg, "loss_curve.csv"), train::loss_curve_csv(trained.report));
    write_text(out_path(cfg, "loss_curve.svg"),
               svg::line_plot("training loss",
                              {{"train", trained.report.train_loss},
                               {"validation", trained.report.val_loss}},
                              "epoch", "loss"));

    char line[200];
    std::snprintf(line, sizeof(line),
                  "trained %s for %zu epochs (%zu steps); final train loss %.6g, last val MSE "
                  "%.6g\n",
                  to_string(cfg.arch.variant), trained.report.epochs_run, trained.report.steps,
                  trained.report.final_train_loss,
                  trained.report.val_loss.empty() ? 0.0 : trained.report.val_loss.back());
    std::cout << line << "checkpoint written to " << out_path(cfg, "checkpoint.json") << "\n";
}

void cmd_evaluate(const RunConfig& cfg, const std::string& checkpoint_path,
                  const std::string& split) {
    const auto cp = ckpt::load_checkpoint(checkpoint_path);
    const auto series = load_series(cfg);
    if (series.column_count() != cp.stats.names.size()) {
        throw errors::config("the dataset provides " + std::to_string(series.column_count()) +
                             " column(s) but the checkpoint was trained on " +
                             std::to_string(cp.stats.names.size()));
    }
    const auto normalized = data::apply_normalization(series, cp.stats);
    const auto ds = data::window(normalized, cp.model.config.lookback_window, cp.stats);

    std::pair<std::size_t, std::size_t> range;
    if (split == "train") {
        range = ds.train_range();
    } else if (split == "val") {
        range = ds.val_range();
    } else if (split == "test") {
        range = ds.test_range();
    } else {
        throw errors::config("unknown split '" + split + "'; expected train, val, or test");
    }

    const auto report = evaluate_split(cp.model, ds, range);
    write_text(out_path(cfg, "eval_report.json"), metrics::to_json(report));
    write_text(out_path(cfg, "eval_report.csv"), metrics::to_csv(report));

    char line[160];
    std::snprintf(line, sizeof(line), "split %s: r2 %.4f, MAPE %.4f%%, MAE %.4f (n=%zu)\n",
                  split.c_str(), report.r2, report.mape_percent, report.mae, report.n);
    std::cout << line;
}

void cmd_forecast(const RunConfig& cfg, const std::string& checkpoint_path) {
    const auto cp = ckpt::load_checkpoint(checkpoint_path);
    const auto series = load_series(cfg);
    if (series.column_count() != cp.stats.names.size()) {
        throw errors::config("the recent-window file provides " +
                             std::to_string(series.column_count()) +
                             " column(s) but the checkpoint was trained on " +
                             std::to_string(cp.stats.names.size()));
    }
    const std::size_t lookback = cp.model.config.lookback_window;
    if (series.size() < lookback) {
        throw errors::input("the recent window has " + std::to_string(series.size()) +
                            " usable rows; the model needs the last " + std::to_string(lookback));
    }
    const auto normalized = data::apply_normalization(series, cp.stats);

    Tensor window({lookback, 1 + normalized.features.size()});
    const std::size_t first = normalized.size() - lookback;
    for (std::size_t t = 0; t < lookback; ++t) {
        window(t, 0) = normalized.load[first + t];
        for (std::size_t f = 0; f < normalized.features.size(); ++f) {
            window(t, 1 + f) = normalized.features[f][first + t];
        }
    }

    Rng rng(0);  // infer mode ignores it
    const double pred_norm = model::forward(cp.model, window, false, rng, nullptr);
    const double pred = cp.stats.denorm_load(pred_norm);

    nlohmann::ordered_json j;
    j["prediction_kwh"] = pred;
    j["window_end"] = series.timestamps.back();
    j["window_rows"] = lookback;
    j["checkpoint_format_version"] = ckpt::k_format_version;
    j["normalization"] = {{"columns", cp.stats.names},
                          {"min", cp.stats.col_min},
                          {"max", cp.stats.col_max}};
    write_text(out_path(cfg, "forecast.json"), j.dump(2) + "\n");

    char line[96];
    std::snprintf(line, sizeof(line), "next-step load forecast: %.6f kWh\n", pred);
    std::cout << line;
}

void cmd_compare(const RunConfig& cfg) {
    const auto ds = prepare_dataset(cfg);
    const auto hp = resolve_hp(cfg);
    const auto test = ds.test_range();

    struct Row {
        std::string name;
        metrics::EvalReport report;
    };
    std::vector<Row> rows;

    rows.push_back({"a2clnet", {}});
    rows.back().report =
        evaluate_split(train_model(cfg, ds, hp, model::Variant::a2clnet).m, ds, test);

    {
        const auto result = run_search(cfg, ds);
        write_search_artifacts(cfg, result);
        rows.push_back({"pso-a2clnet", {}});
        rows.back().report = evaluate_split(
            train_model(cfg, ds, result.best, model::Variant::a2clnet).m, ds, test);
    }

    rows.push_back({"hybrid-cnn-lstm", {}});
    rows.back().report =
        evaluate_split(train_model(cfg, ds, hp, model::Variant::hybrid_cnn_lstm).m, ds, test);
    rows.push_back({"vanilla-cnn", {}});
    rows.back().report =
        evaluate_split(train_model(cfg, ds, hp, model::Variant::vanilla_cnn).m, ds, test);
    rows.push_back({"vanilla-lstm", {}});
    rows.back().report =
        evaluate_split(train_model(cfg, ds, hp, model::Variant::vanilla_lstm).m, ds, test);
    rows.push_back({"persistence", evaluate_persistence(ds, test)});

    std::string csv = "model,r2,mape_percent,mae\n";
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    std::vector<std::pair<std::string, double>> bars;
    char buf[200];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%.12g,%.12g,%.12g\n", row.name.c_str(), row.report.r2,
                      row.report.mape_percent, row.report.mae);
        csv += buf;
        j.push_back({{"model", row.name},
                     {"r2", row.report.r2},
                     {"mape_percent", row.report.mape_percent},
                     {"mae", row.report.mae},
                     {"n", row.report.n}});
        bars.emplace_back(row.name, row.report.mape_percent);
    }
    write_text(out_path(cfg, "compare.csv"), csv);
    write_text(out_path(cfg, "compare.json"), j.dump(2) + "\n");
    write_text(out_path(cfg, "compare.svg"), svg::bar_chart("test MAPE by model", bars, "MAPE (%)"));

    std::cout << "model              r2        MAPE%     MAE\n";
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%-18s %-9.4f %-9.4f %-9.4f\n", row.name.c_str(),
                      row.report.r2, row.report.mape_percent, row.report.mae);
        std::cout << buf;
    }
    std::cout << "table written to " << out_path(cfg, "compare.csv") << "\n";
}

}  // namespace loadcast::cli
