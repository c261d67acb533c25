#include <cmath>

#include <Eigen/Dense>

#include "loadcast/error.hpp"
#include "loadcast/layers.hpp"

namespace loadcast::nn {

namespace {
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMajor>;
}  // namespace

DenseParams dense_zeros(std::size_t out, std::size_t in, Activation activation) {
    return {Tensor({out, in}), Tensor({out}), activation};
}

Tensor dense_forward(const DenseParams& p, const Tensor& x, DenseCache* cache) {
    if (x.size() != p.in_size()) {
        throw errors::shape("dense input " + x.shape_str() + " does not match weight " +
                            p.w.shape_str());
    }
    Tensor z = matvec(p.w, x) + p.b;
    Tensor y = elementwise(z, p.activation);
    if (cache != nullptr) {
        cache->x = x;
        cache->z = z;
        cache->y = y;
    }
    return y;
}

Tensor dense_backward(const DenseParams& p, const DenseCache& cache, const Tensor& dy,
                      DenseParams& grads) {
    const std::size_t out = p.out_size();
    const std::size_t in = p.in_size();
    Tensor dz({out});
    for (std::size_t j = 0; j < out; ++j) {
        double deriv = 1.0;
        switch (p.activation) {
            case Activation::sigmoid: deriv = cache.y(j) * (1.0 - cache.y(j)); break;
            case Activation::tanh: deriv = 1.0 - cache.y(j) * cache.y(j); break;
            case Activation::relu: deriv = cache.z(j) > 0.0 ? 1.0 : 0.0; break;
            case Activation::linear: deriv = 1.0; break;
        }
        dz(j) = dy(j) * deriv;
    }

    MatMap gw(grads.w.data(), static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in));
    gw.noalias() += ConstVecMap(dz.data(), static_cast<Eigen::Index>(out)) *
                    ConstVecMap(cache.x.data(), static_cast<Eigen::Index>(in)).transpose();
    add_in_place(grads.b, dz);

    Tensor dx({in});
    VecMap(dx.data(), static_cast<Eigen::Index>(in)).noalias() =
        MatMap(const_cast<double*>(p.w.data()), static_cast<Eigen::Index>(out),
               static_cast<Eigen::Index>(in))
            .transpose() *
        ConstVecMap(dz.data(), static_cast<Eigen::Index>(out));
    return dx;
}

Tensor dropout_forward(const Tensor& x, double rate, bool train, Rng& rng,
                       DropoutCache* cache) {
    if (!(rate >= 0.0 && rate < 1.0)) {
        throw errors::config("dropout rate must lie in [0, 1), got " + std::to_string(rate));
    }
    if (!train || rate == 0.0) {
        if (cache != nullptr) cache->mask = Tensor::full(x.shape(), 1.0);
        return x;
    }
    const double keep_scale = 1.0 / (1.0 - rate);
    Tensor mask(x.shape());
    Tensor y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) {
        mask[i] = rng.uniform() < rate ? 0.0 : keep_scale;
        y[i] = x[i] * mask[i];
    }
    if (cache != nullptr) cache->mask = std::move(mask);
    return y;
}

Tensor dropout_backward(const DropoutCache& cache, const Tensor& dy) {
    return hadamard(dy, cache.mask);
}

LayerNormParams layer_norm_zeros(std::size_t features) {
    return {Tensor({features}), Tensor({features})};
}

LayerNormParams layer_norm_identity(std::size_t features) {
    return {Tensor::full({features}, 1.0), Tensor({features})};
}

Tensor layer_norm_forward(const LayerNormParams& p, const Tensor& x, LayerNormCache* cache) {
    if (p.epsilon <= 0.0) throw errors::domain("layer norm epsilon must be positive");
    if (x.rank() != 2 || x.dim(1) != p.gain.size()) {
        throw errors::shape("layer norm input " + x.shape_str() + " does not match " +
                            std::to_string(p.gain.size()) + " features");
    }
    const std::size_t rows = x.dim(0);
    const std::size_t cols = x.dim(1);
    Tensor x_hat({rows, cols});
    Tensor inv_std({rows});
    Tensor y({rows, cols});
    for (std::size_t r = 0; r < rows; ++r) {
        const double* xr = x.data() + r * cols;
        double mean = 0.0;
        for (std::size_t c = 0; c < cols; ++c) mean += xr[c];
        mean /= static_cast<double>(cols);
        double var = 0.0;
        for (std::size_t c = 0; c < cols; ++c) var += (xr[c] - mean) * (xr[c] - mean);
        var /= static_cast<double>(cols);
        const double inv = 1.0 / std::sqrt(var + p.epsilon);
        inv_std(r) = inv;
        double* xh = x_hat.data() + r * cols;
        double* yr = y.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) {
            xh[c] = (xr[c] - mean) * inv;
            yr[c] = p.gain(c) * xh[c] + p.shift(c);
        }
    }
    if (cache != nullptr) {
        cache->x_hat = std::move(x_hat);
        cache->inv_std = std::move(inv_std);
    }
    return y;
}

Tensor layer_norm_backward(const LayerNormParams& p, const LayerNormCache& cache,
                           const Tensor& dy, LayerNormParams& grads) {
    const std::size_t rows = dy.dim(0);
    const std::size_t cols = dy.dim(1);
    Tensor dx({rows, cols});
    for (std::size_t r = 0; r < rows; ++r) {
        const double* dyr = dy.data() + r * cols;
        const double* xh = cache.x_hat.data() + r * cols;
        double sum_dxhat = 0.0;
        double sum_dxhat_xhat = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            grads.gain(c) += dyr[c] * xh[c];
            grads.shift(c) += dyr[c];
            const double dxhat = dyr[c] * p.gain(c);
            sum_dxhat += dxhat;
            sum_dxhat_xhat += dxhat * xh[c];
        }
        const double n = static_cast<double>(cols);
        const double inv = cache.inv_std(r);
        double* dxr = dx.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) {
            const double dxhat = dyr[c] * p.gain(c);
            dxr[c] = (inv / n) * (n * dxhat - sum_dxhat - xh[c] * sum_dxhat_xhat);
        }
    }
    return dx;
}

}  // namespace loadcast::nn
