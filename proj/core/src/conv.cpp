#include <algorithm>

#include "loadcast/error.hpp"
#include "loadcast/layers.hpp"

namespace loadcast::nn {

Conv1dParams conv1d_zeros(std::size_t out_channels, std::size_t in_channels,
                          std::size_t kernel_size, std::size_t stride) {
    Conv1dParams p;
    p.filters = Tensor({out_channels, in_channels, kernel_size});
    p.bias = Tensor({out_channels});
    p.stride = stride;
    return p;
}

// The convolution is evaluated as one matrix product: row t of `patches`
// holds the C_in*K input values under the kernel at output step t, ordered to
// match the row-major flattening of the (C_out x C_in x K) filter bank.
static Tensor gather_patches(const Tensor& x, std::size_t k, std::size_t stride,
                             std::size_t t_out) {
    const std::size_t c_in = x.dim(0);
    const std::size_t t_in = x.dim(1);
    Tensor patches({t_out, c_in * k});
    for (std::size_t t = 0; t < t_out; ++t) {
        double* dst = patches.data() + t * c_in * k;
        for (std::size_t c = 0; c < c_in; ++c) {
            const double* src = x.data() + c * t_in + t * stride;
            std::copy(src, src + k, dst + c * k);
        }
    }
    return patches;
}

Tensor conv1d_forward(const Conv1dParams& p, const Tensor& x, Conv1dCache* cache) {
    if (p.stride == 0) throw errors::domain("conv1d stride must be positive");
    if (x.rank() != 2 || x.dim(0) != p.in_channels()) {
        throw errors::shape("conv1d input " + x.shape_str() + " does not provide " +
                            std::to_string(p.in_channels()) + " channels");
    }
    const std::size_t k = p.kernel_size();
    if (x.dim(1) < k) {
        throw errors::shape("conv1d input " + x.shape_str() + " is shorter than kernel size " +
                            std::to_string(k));
    }
    const std::size_t t_out = (x.dim(1) - k) / p.stride + 1;
    Tensor patches = gather_patches(x, k, p.stride, t_out);
    const Tensor w = p.filters.reshaped({p.out_channels(), p.in_channels() * k});
    Tensor y = transpose(matmul(patches, transpose(w)));  // (C_out x T_out)
    for (std::size_t o = 0; o < p.out_channels(); ++o) {
        double* row = y.data() + o * t_out;
        for (std::size_t t = 0; t < t_out; ++t) row[t] += p.bias(o);
    }
    if (cache != nullptr) cache->patches = std::move(patches);
    return y;
}

Tensor conv1d_backward(const Conv1dParams& p, const Conv1dCache& cache, const Tensor& dy,
                       Conv1dParams& grads) {
    const std::size_t k = p.kernel_size();
    const std::size_t c_in = p.in_channels();
    const std::size_t c_out = p.out_channels();
    const std::size_t t_out = dy.dim(1);
    const std::size_t t_in = (t_out - 1) * p.stride + k;

    Tensor dw = matmul(dy, cache.patches);  // (C_out x C_in*K)
    add_in_place(grads.filters, dw.reshaped({c_out, c_in, k}));
    for (std::size_t o = 0; o < c_out; ++o) {
        const double* row = dy.data() + o * t_out;
        for (std::size_t t = 0; t < t_out; ++t) grads.bias(o) += row[t];
    }

    const Tensor w = p.filters.reshaped({c_out, c_in * k});
    Tensor dpatches = matmul(transpose(dy), w);  // (T_out x C_in*K)
    Tensor dx({c_in, t_in});
    for (std::size_t t = 0; t < t_out; ++t) {
        const double* src = dpatches.data() + t * c_in * k;
        for (std::size_t c = 0; c < c_in; ++c) {
            double* dst = dx.data() + c * t_in + t * p.stride;
            for (std::size_t j = 0; j < k; ++j) dst[j] += src[c * k + j];
        }
    }
    return dx;
}

Tensor maxpool1d_forward(const Tensor& x, std::size_t window, std::size_t stride,
                         MaxPool1dCache* cache) {
    if (x.rank() != 2) throw errors::shape("maxpool1d expects a rank-2 input, got " + x.shape_str());
    if (window == 0 || stride == 0) throw errors::domain("maxpool1d window and stride must be positive");
    const std::size_t channels = x.dim(0);
    const std::size_t t_in = x.dim(1);
    if (window > t_in) {
        throw errors::shape("maxpool1d window " + std::to_string(window) +
                            " exceeds input length " + std::to_string(t_in));
    }
    const std::size_t t_out = (t_in - window) / stride + 1;
    Tensor y({channels, t_out});
    std::vector<std::size_t> argmax(channels * t_out);
    for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t t = 0; t < t_out; ++t) {
            std::size_t best = c * t_in + t * stride;
            double best_val = x[best];
            for (std::size_t j = 1; j < window; ++j) {
                const std::size_t idx = c * t_in + t * stride + j;
                if (x[idx] > best_val) {  // strict: ties keep the earliest step
                    best_val = x[idx];
                    best = idx;
                }
            }
            y(c, t) = best_val;
            argmax[c * t_out + t] = best;
        }
    }
    if (cache != nullptr) {
        cache->argmax = std::move(argmax);
        cache->in_shape = x.shape();
    }
    return y;
}

Tensor maxpool1d_backward(const MaxPool1dCache& cache, const Tensor& dy) {
    Tensor dx(cache.in_shape);
    for (std::size_t i = 0; i < dy.size(); ++i) dx[cache.argmax[i]] += dy[i];
    return dx;
}

}  // namespace loadcast::nn
