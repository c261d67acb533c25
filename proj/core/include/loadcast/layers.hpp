#pragma once

#include <cstddef>
#include <vector>

#include "loadcast/rng.hpp"
#include "loadcast/tensor.hpp"

namespace loadcast::nn {

// Every layer follows the same pattern: a parameter struct, a cache struct
// filled by the forward pass when training, and a backward function that
// consumes the cache, *accumulates* parameter gradients into a struct of the
// same type as the parameters, and returns the gradient w.r.t. the input.
// Passing a null cache pointer to a forward runs it in inference mode.
//
// Convolution and pooling are channel-major (channels x time); the recurrent
// and attention layers are time-major (time x features). The model transposes
// at the boundary.

// ---------------------------------------------------------------------------
// 1-D convolution over the time axis, valid padding, no activation.
// Input (C_in x T), output (C_out x T_out), T_out = (T - K)/stride + 1.

struct Conv1dParams {
    Tensor filters;  // (C_out x C_in x K)
    Tensor bias;     // (C_out)
    std::size_t stride = 1;

    std::size_t out_channels() const { return filters.dim(0); }
    std::size_t in_channels() const { return filters.dim(1); }
    std::size_t kernel_size() const { return filters.dim(2); }
};

struct Conv1dCache {
    Tensor patches;  // (T_out x C_in*K), row t = input window under the kernel at t
};

Conv1dParams conv1d_zeros(std::size_t out_channels, std::size_t in_channels,
                          std::size_t kernel_size, std::size_t stride = 1);

Tensor conv1d_forward(const Conv1dParams& p, const Tensor& x, Conv1dCache* cache);
Tensor conv1d_backward(const Conv1dParams& p, const Conv1dCache& cache, const Tensor& dy,
                       Conv1dParams& grads);

// ---------------------------------------------------------------------------
// Max pooling over the time axis of a (channels x time) input. Ties resolve
// to the earliest time step; argmax indices route the backward pass.

struct MaxPool1dCache {
    std::vector<std::size_t> argmax;  // flat input index per output element
    std::vector<std::size_t> in_shape;
};

Tensor maxpool1d_forward(const Tensor& x, std::size_t window, std::size_t stride,
                         MaxPool1dCache* cache);
Tensor maxpool1d_backward(const MaxPool1dCache& cache, const Tensor& dy);

// ---------------------------------------------------------------------------
// Fully connected layer on a vector: y = act(W x + b).

struct DenseParams {
    Tensor w;  // (out x in)
    Tensor b;  // (out)
    Activation activation = Activation::linear;

    std::size_t in_size() const { return w.dim(1); }
    std::size_t out_size() const { return w.dim(0); }
};

struct DenseCache {
    Tensor x, z, y;  // input, pre-activation, output
};

DenseParams dense_zeros(std::size_t out, std::size_t in, Activation activation);

Tensor dense_forward(const DenseParams& p, const Tensor& x, DenseCache* cache);
Tensor dense_backward(const DenseParams& p, const DenseCache& cache, const Tensor& dy,
                      DenseParams& grads);

// ---------------------------------------------------------------------------
// Inverted dropout: surviving elements are scaled by 1/(1-rate) at train time
// so inference is the identity.

struct DropoutCache {
    Tensor mask;  // entries are 0 or 1/(1-rate)
};

Tensor dropout_forward(const Tensor& x, double rate, bool train, Rng& rng,
                       DropoutCache* cache);
Tensor dropout_backward(const DropoutCache& cache, const Tensor& dy);

// ---------------------------------------------------------------------------
// Layer normalization across the feature axis of each row, with learned
// per-feature gain and shift.

struct LayerNormParams {
    Tensor gain;   // (F)
    Tensor shift;  // (F)
    double epsilon = 1e-5;
};

struct LayerNormCache {
    Tensor x_hat;    // (T x F) normalized input
    Tensor inv_std;  // (T) 1/sqrt(var + eps) per row
};

LayerNormParams layer_norm_zeros(std::size_t features);
// Freshly built layers want gain = 1, shift = 0.
LayerNormParams layer_norm_identity(std::size_t features);

Tensor layer_norm_forward(const LayerNormParams& p, const Tensor& x, LayerNormCache* cache);
Tensor layer_norm_backward(const LayerNormParams& p, const LayerNormCache& cache,
                           const Tensor& dy, LayerNormParams& grads);

// ---------------------------------------------------------------------------
// LSTM. Each gate weight acts on the concatenation [h_prev ; x]: the first H
// columns multiply the previous hidden state and the remaining I columns the
// current input.
//
//   f_t = sigmoid(W_f [h_prev; x_t] + b_f)        forget gate
//   i_t = sigmoid(W_i [h_prev; x_t] + b_i)        input gate
//   c~_t = tanh(W_c [h_prev; x_t] + b_c)          candidate state
//   c_t = f_t * c_{t-1} + i_t * c~_t
//   o_t = sigmoid(W_o [h_prev; x_t] + b_o)        output gate
//   h_t = o_t * tanh(c_t)
//
// Every step verifies that gate activations stay inside their codomain
// ([0,1] for the sigmoid gates, [-1,1] for tanh; the closed bounds are
// reachable through floating-point saturation) and raises an internal error
// otherwise, which also catches NaN propagation early.

struct LstmParams {
    Tensor w_f, w_i, w_c, w_o;  // each (H x (H+I))
    Tensor b_f, b_i, b_c, b_o;  // each (H)

    std::size_t hidden_size() const { return w_f.dim(0); }
    std::size_t input_size() const { return w_f.dim(1) - w_f.dim(0); }
};

struct LstmState {
    Tensor h;  // (H)
    Tensor c;  // (H)
};

LstmParams lstm_zeros(std::size_t hidden, std::size_t input);
LstmState lstm_initial_state(std::size_t hidden);

struct LstmCellCache {
    Tensor x, h_prev, c_prev;
    Tensor f, i, o, c_bar, c, tanh_c;
};

/// Single time step; the building block the sequence form must agree with.
LstmState lstm_cell_forward(const LstmParams& p, const Tensor& x, const LstmState& prev,
                            LstmCellCache* cache);

struct LstmCellGrad {
    Tensor dx, dh_prev, dc_prev;
};

LstmCellGrad lstm_cell_backward(const LstmParams& p, const LstmCellCache& cache,
                                const Tensor& dh, const Tensor& dc, LstmParams& grads);

struct LstmSequenceCache {
    Tensor x;                              // (T x I)
    Tensor f, i, o, c_bar, c, tanh_c, h;   // each (T x H)
};

/// Runs the cell over all rows of x from a zero initial state and returns the
/// full hidden sequence (T x H). Callers that need only the final state take
/// the last row.
Tensor lstm_sequence_forward(const LstmParams& p, const Tensor& x, LstmSequenceCache* cache);

/// Backpropagation through time. dh_seq holds the upstream gradient for every
/// hidden row (zero rows for unused steps).
Tensor lstm_sequence_backward(const LstmParams& p, const LstmSequenceCache& cache,
                              const Tensor& dh_seq, LstmParams& grads);

// ---------------------------------------------------------------------------
// Bidirectional LSTM: one pass over x and one over x reversed in time, outputs
// concatenated per step to (T x 2H). Forward half occupies columns [0, H).

struct BilstmParams {
    LstmParams fwd, bwd;
    std::size_t hidden_size() const { return fwd.hidden_size(); }
};

struct BilstmCache {
    LstmSequenceCache fwd, bwd;
};

BilstmParams bilstm_zeros(std::size_t hidden, std::size_t input);

Tensor bilstm_forward(const BilstmParams& p, const Tensor& x, BilstmCache* cache);
Tensor bilstm_backward(const BilstmParams& p, const BilstmCache& cache, const Tensor& dy,
                       BilstmParams& grads);

// ---------------------------------------------------------------------------
// Multi-head scaled dot-product self-attention over a (T x d_model) sequence.
//
//   head_j = softmax(Q_j K_j^T / sqrt(d_k)) V_j,   Q_j = X Wq_j, etc.
//   y = concat(head_1 .. head_h) W_o
//
// d_v = d_k per head, no projection biases; output shape matches the input.

struct AttentionParams {
    Tensor w_q, w_k, w_v;  // each (heads x d_model x d_k)
    Tensor w_o;            // (heads*d_k x d_model)

    std::size_t heads() const { return w_q.dim(0); }
    std::size_t model_dim() const { return w_q.dim(1); }
    std::size_t head_dim() const { return w_q.dim(2); }
};

struct AttentionCache {
    Tensor x;
    std::vector<Tensor> q, k, v;   // per head, (T x d_k)
    std::vector<Tensor> weights;   // per head, (T x T) softmax rows
    Tensor concat;                 // (T x heads*d_k)
};

AttentionParams attention_zeros(std::size_t heads, std::size_t model_dim,
                                std::size_t head_dim);

Tensor attention_forward(const AttentionParams& p, const Tensor& x, AttentionCache* cache);
Tensor attention_backward(const AttentionParams& p, const AttentionCache& cache,
                          const Tensor& dy, AttentionParams& grads);

}  // namespace loadcast::nn
