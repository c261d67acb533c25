#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "json.hpp"
#include "loadcast/error.hpp"
#include "loadcast/parallel.hpp"
#include "loadcast/training.hpp"

namespace loadcast::train {

LossMetric loss_metric_from_name(const std::string& name) {
    if (name == "mse") return LossMetric::mse;
    if (name == "cross-entropy") return LossMetric::cross_entropy;
    if (name == "mape") return LossMetric::mape;
    throw errors::config("unknown loss metric '" + name +
                         "' (expected mse, cross-entropy or mape)");
}

const char* to_string(LossMetric metric) {
    switch (metric) {
        case LossMetric::mse: return "mse";
        case LossMetric::cross_entropy: return "cross-entropy";
        case LossMetric::mape: return "mape";
    }
    return "?";
}

void HyperParams::validate() const {
    const auto fail = [](const std::string& msg) { throw errors::config(msg); };
    if (learning_rate < 0.001 || learning_rate > 0.1) {
        fail("learning_rate " + std::to_string(learning_rate) + " outside [0.001, 0.1]");
    }
    if (batch_size < 1 || batch_size > 128) {
        fail("batch_size " + std::to_string(batch_size) + " outside [1, 128]");
    }
    if (epochs < 100 || epochs > 5000) {
        fail("epochs " + std::to_string(epochs) + " outside [100, 5000]");
    }
}

LossResult loss(const std::vector<double>& pred, const std::vector<double>& target,
                LossMetric metric) {
    if (pred.size() != target.size()) {
        throw errors::shape("loss input lengths differ: " + std::to_string(pred.size()) +
                            " vs " + std::to_string(target.size()));
    }
    if (pred.empty()) throw errors::domain("loss needs at least one prediction");
    const auto n = static_cast<double>(pred.size());
    LossResult r;
    r.grad.resize(pred.size());
    switch (metric) {
        case LossMetric::mse: {
            double sum = 0.0;
            for (std::size_t i = 0; i < pred.size(); ++i) {
                const double d = target[i] - pred[i];
                sum += d * d;
                r.grad[i] = 2.0 * (pred[i] - target[i]) / n;
            }
            r.value = sum / n;
            break;
        }
        case LossMetric::cross_entropy: {
            double sum = 0.0;
            for (std::size_t i = 0; i < pred.size(); ++i) {
                if (!(pred[i] > 0.0 && pred[i] < 1.0)) {
                    throw errors::domain("cross-entropy prediction " + std::to_string(pred[i]) +
                                         " at index " + std::to_string(i) +
                                         " is outside (0, 1)");
                }
                if (!(target[i] >= 0.0 && target[i] <= 1.0)) {
                    throw errors::domain("cross-entropy target " + std::to_string(target[i]) +
                                         " at index " + std::to_string(i) +
                                         " is outside [0, 1]");
                }
                sum -= target[i] * std::log(pred[i]) + (1.0 - target[i]) * std::log(1.0 - pred[i]);
                r.grad[i] = (-target[i] / pred[i] + (1.0 - target[i]) / (1.0 - pred[i])) / n;
            }
            r.value = sum / n;
            break;
        }
        case LossMetric::mape: {
            double sum = 0.0;
            for (std::size_t i = 0; i < pred.size(); ++i) {
                if (target[i] == 0.0) {
                    throw errors::domain("mape loss target is zero at index " +
                                         std::to_string(i));
                }
                const double d = pred[i] - target[i];
                sum += std::abs(d) / std::abs(target[i]);
                const double sign = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
                r.grad[i] = sign / (std::abs(target[i]) * n);
            }
            r.value = sum / n;
            break;
        }
    }
    return r;
}

namespace {

// Loss in the space the metric is defined on: MAPE works on denormalized
// values (normalized targets may be 0), with the chain factor mapping its
// gradient back to normalized predictions; the others work in place.
LossResult training_loss(const std::vector<double>& pred, const std::vector<double>& target,
                         LossMetric metric, const data::NormStats& stats) {
    if (metric != LossMetric::mape) return loss(pred, target, metric);
    std::vector<double> pred_kwh(pred.size()), target_kwh(target.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        pred_kwh[i] = stats.denorm_load(pred[i]);
        target_kwh[i] = stats.denorm_load(target[i]);
    }
    LossResult r = loss(pred_kwh, target_kwh, metric);
    for (double& g : r.grad) g *= stats.load_scale();
    return r;
}

std::vector<Tensor*> parameter_tensors(model::Model& m) {
    std::vector<Tensor*> out;
    model::for_each_param(m, [&out](const std::string&, Tensor& t) { out.push_back(&t); });
    return out;
}

void zero_parameters(model::Model& m) {
    model::for_each_param(
        m, [](const std::string&, Tensor& t) { std::fill(t.data(), t.data() + t.size(), 0.0); });
}

std::string first_non_finite(const model::Model& m) {
    std::string found;
    model::for_each_param(m, [&found](const std::string& path, const Tensor& t) {
        if (found.empty() && !t.all_finite()) found = path;
    });
    return found;
}

constexpr std::size_t k_chunk_grain = 8;
constexpr double k_adam_beta1 = 0.9;
constexpr double k_adam_beta2 = 0.999;
constexpr double k_adam_eps = 1e-8;

}  // namespace

model::Model build_for_loss(model::ArchitectureConfig config, const HyperParams& hp, Rng& rng) {
    model::Model m = model::build(config, hp.init_scheme, rng);
    m.head.activation = hp.loss_metric == LossMetric::cross_entropy ? Activation::sigmoid
                                                                    : Activation::linear;
    return m;
}

TrainReport train(model::Model& m, const data::WindowedDataset& ds, const HyperParams& hp,
                  Rng& rng, const TrainOptions& opts) {
    const auto started = std::chrono::steady_clock::now();
    const std::size_t n_train = ds.train_count;
    if (n_train == 0) throw errors::data("training split is empty");
    const std::size_t epochs = opts.epoch_override > 0 ? opts.epoch_override : hp.epochs;
    const std::size_t batch = std::min(hp.batch_size, n_train);

    model::Model grads = model::zeros_like(m);
    model::Model adam_m = model::zeros_like(m);
    model::Model adam_v = model::zeros_like(m);
    std::vector<Tensor*> params = parameter_tensors(m);
    std::vector<Tensor*> gparams = parameter_tensors(grads);
    std::vector<Tensor*> mparams = parameter_tensors(adam_m);
    std::vector<Tensor*> vparams = parameter_tensors(adam_v);

    // One gradient container per fixed-size chunk: chunk boundaries and the
    // chunk-order reduction below are independent of opts.threads, so the
    // result does not change with the worker count.
    const std::size_t max_chunks = (batch + k_chunk_grain - 1) / k_chunk_grain;
    std::vector<model::Model> chunk_grads;
    chunk_grads.reserve(max_chunks);
    for (std::size_t c = 0; c < max_chunks; ++c) chunk_grads.push_back(model::zeros_like(m));
    std::vector<std::vector<Tensor*>> chunk_gparams;  // collected only once the vector is final
    for (auto& cg : chunk_grads) chunk_gparams.push_back(parameter_tensors(cg));

    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), 0);

    TrainReport report;
    report.seed = rng.seed();
    report.epochs_run = epochs;

    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss_sum = 0.0;
        std::size_t epoch_batches = 0;

        for (std::size_t start = 0; start < n_train; start += batch) {
            const std::size_t count = std::min(batch, n_train - start);
            const Rng step_rng = rng.child(step);
            zero_parameters(grads);
            const std::size_t chunks = (count + k_chunk_grain - 1) / k_chunk_grain;
            std::vector<double> chunk_loss(chunks, 0.0);

            parallel_chunks(count, k_chunk_grain, opts.threads,
                            [&](std::size_t begin, std::size_t end) {
                const std::size_t ci = begin / k_chunk_grain;
                zero_parameters(chunk_grads[ci]);
                std::vector<model::ModelCache> caches(end - begin);
                std::vector<double> preds(end - begin), targets(end - begin);
                for (std::size_t j = begin; j < end; ++j) {
                    const std::size_t w = order[start + j];
                    Rng ex_rng = step_rng.child(j);
                    preds[j - begin] =
                        model::forward(m, ds.window(w), true, ex_rng, &caches[j - begin]);
                    targets[j - begin] = ds.y[w];
                }
                LossResult lr = training_loss(preds, targets, hp.loss_metric, ds.stats);
                const double weight =
                    static_cast<double>(end - begin) / static_cast<double>(count);
                chunk_loss[ci] = lr.value * weight;
                for (std::size_t j = begin; j < end; ++j) {
                    model::backward(m, caches[j - begin], lr.grad[j - begin] * weight,
                                    chunk_grads[ci]);
                }
            });

            double batch_loss = 0.0;
            for (std::size_t ci = 0; ci < chunks; ++ci) {
                batch_loss += chunk_loss[ci];
                for (std::size_t p = 0; p < gparams.size(); ++p) {
                    add_in_place(*gparams[p], *chunk_gparams[ci][p]);
                }
            }

            if (!std::isfinite(batch_loss)) {
                const std::string culprit = first_non_finite(m);
                throw errors::internal(
                    "training aborted at epoch " + std::to_string(epoch + 1) + ", step " +
                    std::to_string(step + 1) + ": non-finite loss; first offending layer: " +
                    (culprit.empty() ? std::string("(activations only)") : culprit));
            }

            // Global-norm gradient clipping keeps BPTT from exploding.
            double sq_norm = 0.0;
            for (Tensor* g : gparams) {
                for (std::size_t i = 0; i < g->size(); ++i) sq_norm += (*g)[i] * (*g)[i];
            }
            const double norm = std::sqrt(sq_norm);
            if (opts.clip_norm > 0.0 && norm > opts.clip_norm) {
                const double scale = opts.clip_norm / norm;
                for (Tensor* g : gparams) {
                    for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] *= scale;
                }
            }

            ++step;
            if (opts.use_sgd) {
                for (std::size_t p = 0; p < params.size(); ++p) {
                    axpy_in_place(*params[p], -hp.learning_rate, *gparams[p]);
                }
            } else {
                const double bc1 = 1.0 - std::pow(k_adam_beta1, static_cast<double>(step));
                const double bc2 = 1.0 - std::pow(k_adam_beta2, static_cast<double>(step));
                for (std::size_t p = 0; p < params.size(); ++p) {
                    Tensor& theta = *params[p];
                    Tensor& g = *gparams[p];
                    Tensor& mm = *mparams[p];
                    Tensor& vv = *vparams[p];
                    for (std::size_t i = 0; i < theta.size(); ++i) {
                        mm[i] = k_adam_beta1 * mm[i] + (1.0 - k_adam_beta1) * g[i];
                        vv[i] = k_adam_beta2 * vv[i] + (1.0 - k_adam_beta2) * g[i] * g[i];
                        theta[i] -= hp.learning_rate * (mm[i] / bc1) /
                                    (std::sqrt(vv[i] / bc2) + k_adam_eps);
                    }
                }
            }
            epoch_loss_sum += batch_loss;
            ++epoch_batches;
        }

        report.train_loss.push_back(epoch_loss_sum / static_cast<double>(epoch_batches));
        report.val_loss.push_back(validation_mse(m, ds));
    }

    report.steps = step;
    {
        const auto range = ds.train_range();
        const std::vector<double> preds = predict_range(m, ds, range);
        std::vector<double> targets(ds.y.begin() + static_cast<std::ptrdiff_t>(range.first),
                                    ds.y.begin() + static_cast<std::ptrdiff_t>(range.second));
        report.final_train_loss = training_loss(preds, targets, hp.loss_metric, ds.stats).value;
    }
    report.param_checksum = parameter_checksum(m);
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

std::vector<double> predict_range(const model::Model& m, const data::WindowedDataset& ds,
                                  std::pair<std::size_t, std::size_t> range) {
    std::vector<double> preds;
    preds.reserve(range.second - range.first);
    Rng unused(0);
    for (std::size_t i = range.first; i < range.second; ++i) {
        preds.push_back(model::forward(m, ds.window(i), false, unused, nullptr));
    }
    return preds;
}

double validation_mse(const model::Model& m, const data::WindowedDataset& ds) {
    const auto range = ds.val_range();
    if (range.second == range.first) return 0.0;
    const std::vector<double> preds = predict_range(m, ds, range);
    double sum = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double d = preds[i] - ds.y[range.first + i];
        sum += d * d;
    }
    return sum / static_cast<double>(preds.size());
}

std::uint64_t parameter_checksum(const model::Model& m) {
    std::uint64_t hash = 14695981039346656037ULL;
    model::for_each_param(m, [&hash](const std::string&, const Tensor& t) {
        const auto* bytes = reinterpret_cast<const unsigned char*>(t.data());
        for (std::size_t i = 0; i < t.size() * sizeof(double); ++i) {
            hash ^= bytes[i];
            hash *= 1099511628211ULL;
        }
    });
    return hash;
}

std::string to_json(const TrainReport& report, bool include_timing) {
    nlohmann::ordered_json j;
    j["epochs_run"] = report.epochs_run;
    j["steps"] = report.steps;
    j["train_loss"] = report.train_loss;
    j["val_loss"] = report.val_loss;
    j["final_train_loss"] = report.final_train_loss;
    if (include_timing) j["wall_seconds"] = report.wall_seconds;
    j["param_checksum"] = std::to_string(report.param_checksum);
    j["seed"] = std::to_string(report.seed);
    return j.dump(2) + "\n";
}

std::string loss_curve_csv(const TrainReport& report) {
    std::string out = "epoch,train_loss,val_loss\n";
    char row[96];
    for (std::size_t e = 0; e < report.train_loss.size(); ++e) {
        std::snprintf(row, sizeof(row), "%zu,%.17g,%.17g\n", e + 1, report.train_loss[e],
                      report.val_loss[e]);
        out += row;
    }
    return out;
}

}  // namespace loadcast::train
