#include <cmath>

#include "loadcast/error.hpp"
#include "loadcast/layers.hpp"

namespace loadcast::nn {

namespace {

// Extracts projection j from the (heads x d_model x d_k) stack as a matrix.
Tensor head_slice(const Tensor& stack, std::size_t j) {
    const std::size_t d_model = stack.dim(1);
    const std::size_t d_k = stack.dim(2);
    Tensor w({d_model, d_k});
    const double* src = stack.data() + j * d_model * d_k;
    std::copy(src, src + d_model * d_k, w.data());
    return w;
}

void add_head_slice(Tensor& stack, std::size_t j, const Tensor& delta) {
    double* dst = stack.data() + j * delta.size();
    for (std::size_t i = 0; i < delta.size(); ++i) dst[i] += delta[i];
}

// Gradient of row-wise softmax: ds = a * (da - rowdot(da, a)).
Tensor softmax_rows_backward(const Tensor& a, const Tensor& da) {
    const std::size_t rows = a.dim(0);
    const std::size_t cols = a.dim(1);
    Tensor ds({rows, cols});
    for (std::size_t r = 0; r < rows; ++r) {
        const double* ar = a.data() + r * cols;
        const double* dar = da.data() + r * cols;
        double dot = 0.0;
        for (std::size_t c = 0; c < cols; ++c) dot += ar[c] * dar[c];
        double* out = ds.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) out[c] = ar[c] * (dar[c] - dot);
    }
    return ds;
}

}  // namespace

AttentionParams attention_zeros(std::size_t heads, std::size_t model_dim, std::size_t head_dim) {
    AttentionParams p;
    p.w_q = Tensor({heads, model_dim, head_dim});
    p.w_k = Tensor({heads, model_dim, head_dim});
    p.w_v = Tensor({heads, model_dim, head_dim});
    p.w_o = Tensor({heads * head_dim, model_dim});
    return p;
}

Tensor attention_forward(const AttentionParams& p, const Tensor& x, AttentionCache* cache) {
    if (x.rank() != 2 || x.dim(1) != p.model_dim()) {
        throw errors::shape("attention input " + x.shape_str() + " does not match model dim " +
                            std::to_string(p.model_dim()));
    }
    const std::size_t steps = x.dim(0);
    const std::size_t heads = p.heads();
    const std::size_t d_k = p.head_dim();
    const double scale = 1.0 / std::sqrt(static_cast<double>(d_k));

    Tensor concat({steps, heads * d_k});
    std::vector<Tensor> qs, ks, vs, weights;
    for (std::size_t j = 0; j < heads; ++j) {
        Tensor q = matmul(x, head_slice(p.w_q, j));
        Tensor k = matmul(x, head_slice(p.w_k, j));
        Tensor v = matmul(x, head_slice(p.w_v, j));
        Tensor a = softmax_rows(scaled(matmul(q, transpose(k)), scale));
        Tensor head = matmul(a, v);  // (T x d_k)
        for (std::size_t t = 0; t < steps; ++t) {
            std::copy(head.data() + t * d_k, head.data() + (t + 1) * d_k,
                      concat.data() + t * heads * d_k + j * d_k);
        }
        if (cache != nullptr) {
            qs.push_back(std::move(q));
            ks.push_back(std::move(k));
            vs.push_back(std::move(v));
            weights.push_back(std::move(a));
        }
    }
    Tensor y = matmul(concat, p.w_o);
    if (cache != nullptr) {
        cache->x = x;
        cache->q = std::move(qs);
        cache->k = std::move(ks);
        cache->v = std::move(vs);
        cache->weights = std::move(weights);
        cache->concat = std::move(concat);
    }
    return y;
}

Tensor attention_backward(const AttentionParams& p, const AttentionCache& cache,
                          const Tensor& dy, AttentionParams& grads) {
    const std::size_t steps = dy.dim(0);
    const std::size_t heads = p.heads();
    const std::size_t d_k = p.head_dim();
    const double scale = 1.0 / std::sqrt(static_cast<double>(d_k));

    add_in_place(grads.w_o, matmul(transpose(cache.concat), dy));
    const Tensor dconcat = matmul(dy, transpose(p.w_o));  // (T x heads*d_k)

    Tensor dx(cache.x.shape());
    for (std::size_t j = 0; j < heads; ++j) {
        Tensor dhead({steps, d_k});
        for (std::size_t t = 0; t < steps; ++t) {
            std::copy(dconcat.data() + t * heads * d_k + j * d_k,
                      dconcat.data() + t * heads * d_k + (j + 1) * d_k, dhead.data() + t * d_k);
        }
        const Tensor& a = cache.weights[j];
        const Tensor da = matmul(dhead, transpose(cache.v[j]));
        const Tensor dv = matmul(transpose(a), dhead);
        const Tensor dscores = scaled(softmax_rows_backward(a, da), scale);
        const Tensor dq = matmul(dscores, cache.k[j]);
        const Tensor dk = matmul(transpose(dscores), cache.q[j]);

        add_head_slice(grads.w_q, j, matmul(transpose(cache.x), dq));
        add_head_slice(grads.w_k, j, matmul(transpose(cache.x), dk));
        add_head_slice(grads.w_v, j, matmul(transpose(cache.x), dv));

        add_in_place(dx, matmul(dq, transpose(head_slice(p.w_q, j))));
        add_in_place(dx, matmul(dk, transpose(head_slice(p.w_k, j))));
        add_in_place(dx, matmul(dv, transpose(head_slice(p.w_v, j))));
    }
    return dx;
}

}  // namespace loadcast::nn
