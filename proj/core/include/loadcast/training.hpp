#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "loadcast/dataio.hpp"
#include "loadcast/init.hpp"
#include "loadcast/model.hpp"
#include "loadcast/rng.hpp"

namespace loadcast::train {

/// Loss functions selectable by the hyperparameter search. Cross-entropy is
/// the binary form on min-max-normalized loads and swaps the model's output
/// head to a sigmoid; MAPE is computed on denormalized values.
enum class LossMetric { mse, cross_entropy, mape };

LossMetric loss_metric_from_name(const std::string& name);
const char* to_string(LossMetric metric);

/// The searchable hyperparameters and their legal ranges.
struct HyperParams {
    double learning_rate = 0.005;  // [0.001, 0.1]
    std::size_t batch_size = 32;   // [1, 128]
    std::size_t epochs = 150;      // [100, 5000]
    InitScheme init_scheme = InitScheme::xavier;
    LossMetric loss_metric = LossMetric::mse;

    /// Throws a configuration error when a field leaves its range. train()
    /// itself does not call this, so tests may drive edge values directly.
    void validate() const;
};

/// Pointwise loss over a batch of predictions, returning the value and the
/// gradient w.r.t. each prediction. MAPE values are fractions (x100 only at
/// reporting); cross-entropy requires predictions strictly inside (0,1) and
/// targets within [0,1].
struct LossResult {
    double value = 0.0;
    std::vector<double> grad;
};

LossResult loss(const std::vector<double>& pred, const std::vector<double>& target,
                LossMetric metric);

struct TrainOptions {
    std::size_t epoch_override = 0;  // 0 honors hp.epochs; otherwise caps the run
    bool use_sgd = false;            // plain SGD instead of Adam, for ablation
    double clip_norm = 5.0;          // global gradient norm ceiling
    int threads = 1;                 // per-batch gradient workers (result is thread-count independent)
};

struct TrainReport {
    std::vector<double> train_loss;  // per epoch: mean of the epoch's batch losses
    std::vector<double> val_loss;    // per epoch: MSE on the normalized validation split
    double final_train_loss = 0.0;   // full training-split loss of the final weights (hp metric)
    double wall_seconds = 0.0;
    std::uint64_t param_checksum = 0;  // FNV-1a over final parameter bytes
    std::uint64_t seed = 0;
    std::size_t steps = 0;  // optimizer steps == epochs * ceil(n_train / batch_size)
    std::size_t epochs_run = 0;
};

/// Builds a model whose output head matches the loss choice: sigmoid for
/// cross-entropy (predictions must live in (0,1)), linear otherwise.
model::Model build_for_loss(model::ArchitectureConfig config, const HyperParams& hp, Rng& rng);

/// Mini-batch training with Adam (or SGD) and per-epoch shuffling. All
/// stochastic choices derive from `rng`, so one seed reproduces one run
/// bit-for-bit. A non-finite loss aborts with a diagnostic naming the first
/// offending parameter tensor.
TrainReport train(model::Model& m, const data::WindowedDataset& ds, const HyperParams& hp,
                  Rng& rng, const TrainOptions& opts = {});

/// Inference-mode predictions (normalized scale) for dataset windows
/// [range.first, range.second).
std::vector<double> predict_range(const model::Model& m, const data::WindowedDataset& ds,
                                  std::pair<std::size_t, std::size_t> range);

/// Reference fitness metric: MSE between normalized predictions and targets
/// on the validation split, independent of the training loss choice.
double validation_mse(const model::Model& m, const data::WindowedDataset& ds);

/// FNV-1a over the bytes of every parameter tensor in stable order.
std::uint64_t parameter_checksum(const model::Model& m);

/// TrainReport as JSON; loss curves as CSV (epoch, train_loss, val_loss).
/// Timing can be left out so written reports stay byte-reproducible.
std::string to_json(const TrainReport& report, bool include_timing = true);
std::string loss_curve_csv(const TrainReport& report);

}  // namespace loadcast::train
