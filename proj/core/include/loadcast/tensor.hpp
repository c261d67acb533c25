#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace loadcast {

/// Dense N-dimensional array of 64-bit floats in row-major order.
///
/// The flat buffer always has exactly product(shape) elements. Tensors are
/// treated as immutable once an operation has returned them; mutation is
/// reserved for code that owns the tensor (builders, optimizers).
class Tensor {
public:
    Tensor() = default;

    /// Zero-filled tensor of the given shape.
    explicit Tensor(std::vector<std::size_t> shape);

    /// Tensor over an explicit flat buffer; throws a shape error when
    /// product(shape) != data.size().
    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    static Tensor scalar(double value);
    static Tensor vector(std::vector<double> values);
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
    static Tensor full(std::vector<std::size_t> shape, double value);

    const std::vector<std::size_t>& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_.size(); }
    std::size_t dim(std::size_t axis) const;

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    // Flat and multi-dimensional access. Unchecked on purpose: these sit in
    // the innermost loops of every layer.
    double operator[](std::size_t flat) const noexcept { return data_[flat]; }
    double& operator[](std::size_t flat) noexcept { return data_[flat]; }
    double operator()(std::size_t i) const noexcept { return data_[i]; }
    double& operator()(std::size_t i) noexcept { return data_[i]; }
    double operator()(std::size_t i, std::size_t j) const noexcept {
        return data_[i * shape_[1] + j];
    }
    double& operator()(std::size_t i, std::size_t j) noexcept {
        return data_[i * shape_[1] + j];
    }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const noexcept {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }
    double& operator()(std::size_t i, std::size_t j, std::size_t k) noexcept {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }

    /// Same buffer under a new shape; element count must be preserved.
    Tensor reshaped(std::vector<std::size_t> new_shape) const;

    bool same_shape(const Tensor& other) const noexcept { return shape_ == other.shape_; }

    /// Human-readable shape such as "(5 x 4)" for error messages.
    std::string shape_str() const;

    /// True when every element is finite (no NaN/Inf).
    bool all_finite() const noexcept;

    /// Throws an internal error naming `context` unless all elements are finite.
    void require_finite(const char* context) const;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

/// Named scalar activation functions usable with elementwise().
enum class Activation { sigmoid, tanh, relu, linear };

/// Parses an activation name; unknown names raise a config error.
Activation activation_from_name(const std::string& name);
const char* to_string(Activation f);

/// c[i][j] = sum_p a[i][p] * b[p][j]; both arguments must be rank-2 and the
/// inner dimensions must agree. Output is checked finite.
Tensor matmul(const Tensor& a, const Tensor& b);

/// y[i] = sum_p a[i][p] * x[p] for rank-2 `a` and rank-1 `x`.
Tensor matvec(const Tensor& a, const Tensor& x);

/// Rank-2 transpose.
Tensor transpose(const Tensor& a);

/// Row-wise softmax with max-subtraction for overflow stability; every output
/// row is nonnegative and sums to 1.
Tensor softmax_rows(const Tensor& x);

/// Applies a named scalar function to every element.
Tensor elementwise(const Tensor& x, Activation f);

// Arithmetic used by the layer kernels. Shapes must match exactly; there is
// no broadcasting.
Tensor operator+(const Tensor& a, const Tensor& b);
Tensor operator-(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor scaled(const Tensor& a, double factor);
void add_in_place(Tensor& acc, const Tensor& delta);
void axpy_in_place(Tensor& acc, double factor, const Tensor& delta);

}  // namespace loadcast
