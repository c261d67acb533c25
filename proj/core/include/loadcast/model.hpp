#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "loadcast/init.hpp"
#include "loadcast/layers.hpp"
#include "loadcast/rng.hpp"
#include "loadcast/tensor.hpp"

namespace loadcast::model {

/// Which network to assemble. `a2clnet` is the full attention-augmented
/// stack; the others are the reference architectures it is compared against.
enum class Variant { a2clnet, vanilla_cnn, vanilla_lstm, hybrid_cnn_lstm };

Variant variant_from_name(const std::string& name);
const char* to_string(Variant v);

/// Structural description of a network. Default values are the hand-tuned
/// experiment defaults; they are deliberately small enough to train on one
/// core in minutes.
struct ArchitectureConfig {
    std::size_t lookback_window = 24;  // input timesteps per window
    std::size_t input_features = 1;    // channels per timestep
    std::size_t conv_filters = 16;
    std::size_t conv_kernel = 3;
    std::size_t lstm1_hidden = 8;  // per direction, first bidirectional block
    std::size_t lstm2_hidden = 8;  // per direction, second bidirectional block
    std::size_t lstm3_hidden = 8;  // final unidirectional layer
    std::size_t attn_heads = 2;
    std::size_t attn_key_dim = 8;
    double dropout_rate = 0.1;
    Variant variant = Variant::a2clnet;
};

/// Rejects configs with zero extents, an out-of-range dropout rate, or layer
/// dims that cannot be chained (e.g. lookback shorter than the conv kernel).
void validate(const ArchitectureConfig& config);

/// A built network: the config plus every stage's parameters. Only the stages
/// the variant uses are allocated; the rest stay empty. The same struct also
/// serves as the gradient container (see zeros_like).
///
/// Stack order for the full variant:
///   conv -> dropout -> bilstm1 -> layer norm -> dropout -> attention
///        -> bilstm2 -> dropout -> lstm3 (last step) -> linear head
struct Model {
    ArchitectureConfig config;
    nn::Conv1dParams conv;
    nn::BilstmParams bilstm1;
    nn::LayerNormParams norm;
    nn::AttentionParams attn;
    nn::BilstmParams bilstm2;
    nn::LstmParams lstm3;
    nn::DenseParams head;
};

/// Builds and initializes a model; weights are drawn from `rng` in the stable
/// parameter order, so one seed yields one parameter set.
Model build(const ArchitectureConfig& config, InitScheme scheme, Rng& rng);

/// Same structure with all parameter tensors zeroed; used to accumulate
/// gradients so optimizers can walk parameters and gradients in lockstep.
Model zeros_like(const Model& m);

struct ModelCache {
    nn::Conv1dCache conv;
    nn::MaxPool1dCache pool;
    nn::DropoutCache drop1, drop2, drop3;
    nn::BilstmCache bilstm1, bilstm2;
    nn::LayerNormCache norm;
    nn::AttentionCache attn;
    nn::LstmSequenceCache lstm3;
    nn::DenseCache head;
};

/// Runs one (lookback x features) window through the network and returns the
/// next-step prediction in normalized space. Train mode draws dropout masks
/// from `rng`; infer mode is deterministic and ignores it.
double forward(const Model& m, const Tensor& window, bool train, Rng& rng, ModelCache* cache);

/// Backward pass for d(loss)/d(prediction) = dy. Accumulates parameter
/// gradients into `grads` (a zeros_like sibling) and returns the gradient
/// w.r.t. the input window.
Tensor backward(const Model& m, const ModelCache& cache, double dy, Model& grads);

/// Visits every trainable tensor of the variant in a stable order with a
/// stable path key such as "bilstm1.fwd.w_f".
void for_each_param(Model& m, const std::function<void(const std::string&, Tensor&)>& fn);
void for_each_param(const Model& m,
                    const std::function<void(const std::string&, const Tensor&)>& fn);

std::size_t param_count(const Model& m);

}  // namespace loadcast::model
