#include "loadcast/tensor.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "loadcast/error.hpp"

namespace loadcast {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t extent : shape) n *= extent;
    return n;
}

using EigenRowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<EigenRowMajor>;
using ConstMatMap = Eigen::Map<const EigenRowMajor>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_product(shape_) != data_.size()) {
        std::ostringstream msg;
        msg << "tensor shape " << shape_str() << " requires " << shape_product(shape_)
            << " elements but " << data_.size() << " were provided";
        throw errors::shape(msg.str());
    }
}

Tensor Tensor::scalar(double value) { return Tensor({1}, {value}); }

Tensor Tensor::vector(std::vector<double> values) {
    std::vector<std::size_t> shape{values.size()};
    return Tensor(std::move(shape), std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
    return Tensor({rows, cols}, std::move(values));
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value) {
    Tensor t(std::move(shape));
    std::fill(t.data_.begin(), t.data_.end(), value);
    return t;
}

std::size_t Tensor::dim(std::size_t axis) const {
    if (axis >= shape_.size()) {
        throw errors::shape("axis " + std::to_string(axis) + " out of range for tensor " +
                            shape_str());
    }
    return shape_[axis];
}

Tensor Tensor::reshaped(std::vector<std::size_t> new_shape) const {
    if (shape_product(new_shape) != data_.size()) {
        Tensor probe;
        probe.shape_ = new_shape;
        throw errors::shape("cannot reshape " + shape_str() + " to " + probe.shape_str() +
                            ": element counts differ");
    }
    Tensor out;
    out.shape_ = std::move(new_shape);
    out.data_ = data_;
    return out;
}

std::string Tensor::shape_str() const {
    std::ostringstream out;
    out << "(";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (i > 0) out << " x ";
        out << shape_[i];
    }
    out << ")";
    return out.str();
}

bool Tensor::all_finite() const noexcept {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void Tensor::require_finite(const char* context) const {
    if (!all_finite()) {
        throw errors::internal(std::string(context) + " produced a non-finite value");
    }
}

Activation activation_from_name(const std::string& name) {
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "tanh") return Activation::tanh;
    if (name == "relu") return Activation::relu;
    if (name == "linear") return Activation::linear;
    throw errors::config("unknown activation function '" + name +
                         "' (expected sigmoid, tanh, relu or linear)");
}

const char* to_string(Activation f) {
    switch (f) {
        case Activation::sigmoid: return "sigmoid";
        case Activation::tanh: return "tanh";
        case Activation::relu: return "relu";
        case Activation::linear: return "linear";
    }
    return "unknown";
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2) {
        throw errors::shape("matmul expects rank-2 operands, got " + a.shape_str() + " and " +
                            b.shape_str());
    }
    if (a.dim(1) != b.dim(0)) {
        throw errors::shape("matmul inner dimensions disagree: " + a.shape_str() + " by " +
                            b.shape_str());
    }
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    Tensor c({m, n});
    ConstMatMap ma(a.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
    ConstMatMap mb(b.data(), static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
    MatMap mc(c.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    mc.noalias() = ma * mb;
    c.require_finite("matmul");
    return c;
}

Tensor matvec(const Tensor& a, const Tensor& x) {
    if (a.rank() != 2 || x.rank() != 1) {
        throw errors::shape("matvec expects a rank-2 matrix and a rank-1 vector, got " +
                            a.shape_str() + " and " + x.shape_str());
    }
    if (a.dim(1) != x.dim(0)) {
        throw errors::shape("matvec dimensions disagree: " + a.shape_str() + " by " +
                            x.shape_str());
    }
    const std::size_t m = a.dim(0), k = a.dim(1);
    Tensor y({m});
    ConstMatMap ma(a.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
    ConstVecMap vx(x.data(), static_cast<Eigen::Index>(k));
    VecMap vy(y.data(), static_cast<Eigen::Index>(m));
    vy.noalias() = ma * vx;
    y.require_finite("matvec");
    return y;
}

Tensor transpose(const Tensor& a) {
    if (a.rank() != 2) {
        throw errors::shape("transpose expects a rank-2 tensor, got " + a.shape_str());
    }
    const std::size_t m = a.dim(0), n = a.dim(1);
    Tensor t({n, m});
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) t(j, i) = a(i, j);
    }
    return t;
}

Tensor softmax_rows(const Tensor& x) {
    if (x.rank() != 2) {
        throw errors::shape("softmax_rows expects a rank-2 tensor, got " + x.shape_str());
    }
    const std::size_t rows = x.dim(0), cols = x.dim(1);
    if (cols == 0) {
        throw errors::shape("softmax_rows requires at least one column");
    }
    Tensor out({rows, cols});
    for (std::size_t i = 0; i < rows; ++i) {
        double max_v = x(i, 0);
        for (std::size_t j = 1; j < cols; ++j) max_v = std::max(max_v, x(i, j));
        double sum = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            const double e = std::exp(x(i, j) - max_v);
            out(i, j) = e;
            sum += e;
        }
        for (std::size_t j = 0; j < cols; ++j) out(i, j) /= sum;
    }
    out.require_finite("softmax_rows");
    return out;
}

Tensor elementwise(const Tensor& x, Activation f) {
    Tensor out(x.shape());
    const double* in = x.data();
    double* dst = out.data();
    const std::size_t n = x.size();
    switch (f) {
        case Activation::sigmoid:
            for (std::size_t i = 0; i < n; ++i) dst[i] = 1.0 / (1.0 + std::exp(-in[i]));
            break;
        case Activation::tanh:
            for (std::size_t i = 0; i < n; ++i) dst[i] = std::tanh(in[i]);
            break;
        case Activation::relu:
            for (std::size_t i = 0; i < n; ++i) dst[i] = in[i] > 0.0 ? in[i] : 0.0;
            break;
        case Activation::linear:
            for (std::size_t i = 0; i < n; ++i) dst[i] = in[i];
            break;
    }
    return out;
}

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) {
        throw errors::shape(std::string(op) + " requires matching shapes, got " + a.shape_str() +
                            " and " + b.shape_str());
    }
}

}  // namespace

Tensor operator+(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "tensor addition");
    Tensor out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

Tensor operator-(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "tensor subtraction");
    Tensor out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "hadamard product");
    Tensor out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

Tensor scaled(const Tensor& a, double factor) {
    Tensor out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * factor;
    return out;
}

void add_in_place(Tensor& acc, const Tensor& delta) {
    require_same_shape(acc, delta, "in-place addition");
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += delta[i];
}

void axpy_in_place(Tensor& acc, double factor, const Tensor& delta) {
    require_same_shape(acc, delta, "in-place axpy");
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += factor * delta[i];
}

}  // namespace loadcast
