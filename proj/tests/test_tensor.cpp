#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "loadcast/error.hpp"
#include "loadcast/tensor.hpp"
#include "support/oracles.hpp"

using namespace loadcast;

TEST_CASE("tensor shape and flat buffer stay consistent") {
    Tensor t({2, 3});
    CHECK(t.rank() == 2);
    CHECK(t.size() == 6);
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i] == 0.0);
    CHECK_THROWS_AS(Tensor({2, 3}, {1.0, 2.0}), Error);
    CHECK(Tensor::matrix(2, 2, {1, 2, 3, 4})(1, 0) == 3.0);
}

TEST_CASE("reshape preserves row-major flat indexing") {
    Rng rng(11);
    Tensor t({3, 4, 5});
    oracle::fill_uniform(t, rng, -1.0, 1.0);
    const Tensor r = t.reshaped({4, 15});
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            for (std::size_t k = 0; k < 5; ++k) {
                const std::size_t flat = (i * 4 + j) * 5 + k;
                CHECK(t(i, j, k) == r(flat / 15, flat % 15));
            }
    CHECK_THROWS_AS(t.reshaped({7, 7}), Error);
}

TEST_CASE("matmul identity case") {
    const Tensor eye = Tensor::matrix(2, 2, {1, 0, 0, 1});
    const Tensor a = Tensor::matrix(2, 2, {1, 2, 3, 4});
    const Tensor c = matmul(eye, a);
    for (std::size_t i = 0; i < 4; ++i) CHECK(c[i] == a[i]);
}

TEST_CASE("matmul hand expansion") {
    const Tensor a = Tensor::matrix(1, 2, {1, 2});
    const Tensor b = Tensor::matrix(2, 1, {3, 4});
    const Tensor c = matmul(a, b);
    CHECK(c.size() == 1);
    CHECK(c[0] == 11.0);
}

TEST_CASE("matmul matches the triple-loop oracle") {
    Rng rng(7);
    Tensor a({5, 4}), b({4, 3});
    oracle::fill_uniform(a, rng, -2.0, 2.0);
    oracle::fill_uniform(b, rng, -2.0, 2.0);
    const Tensor c = matmul(a, b);
    const auto expect = oracle::matmul(oracle::as_rows(a), oracle::as_rows(b));
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(std::fabs(c(i, j) - expect[i][j]) < 1e-12);
}

TEST_CASE("matmul dimension mismatch names both shapes") {
    const Tensor a({2, 3}), b({4, 2});
    try {
        matmul(a, b);
        FAIL("expected a shape error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::shape);
        CHECK(std::string(e.what()).find("(2 x 3)") != std::string::npos);
        CHECK(std::string(e.what()).find("(4 x 2)") != std::string::npos);
    }
}

TEST_CASE("matmul associativity with identity within 1e-12") {
    Rng rng(3);
    Tensor a({4, 4}), b({4, 4});
    oracle::fill_uniform(a, rng, -1.0, 1.0);
    oracle::fill_uniform(b, rng, -1.0, 1.0);
    Tensor eye({4, 4});
    for (std::size_t i = 0; i < 4; ++i) eye(i, i) = 1.0;
    const Tensor left = matmul(matmul(a, eye), b);
    const Tensor right = matmul(a, matmul(eye, b));
    for (std::size_t i = 0; i < left.size(); ++i) CHECK(std::fabs(left[i] - right[i]) < 1e-12);
}

TEST_CASE("matvec matches per-row dot products") {
    const Tensor a = Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6});
    const Tensor x = Tensor::vector({1, 1, 2});
    const Tensor y = matvec(a, x);
    CHECK(y[0] == 9.0);
    CHECK(y[1] == 21.0);
    CHECK_THROWS_AS(matvec(a, Tensor::vector({1, 2})), Error);
}

TEST_CASE("softmax of a uniform row is uniform") {
    const Tensor s = softmax_rows(Tensor::matrix(1, 3, {0, 0, 0}));
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::fabs(s[i] - 1.0 / 3.0) < 1e-15);
}

TEST_CASE("softmax survives large logits") {
    const Tensor s = softmax_rows(Tensor::matrix(1, 2, {1000.0, 0.0}));
    CHECK(s[0] > 0.999999);
    CHECK(s[1] < 1e-6);
    CHECK(s.all_finite());
}

TEST_CASE("softmax matches the direct exp formula") {
    const Tensor s = softmax_rows(Tensor::matrix(1, 3, {1, 2, 3}));
    const double denom = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(std::fabs(s[i] - std::exp(1.0 + static_cast<double>(i)) / denom) < 1e-12);
}

TEST_CASE("softmax rows sum to one and stay in [0,1]") {
    Rng rng(19);
    Tensor x({6, 9});
    oracle::fill_uniform(x, rng, -30.0, 30.0);
    const Tensor s = softmax_rows(x);
    for (std::size_t r = 0; r < 6; ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < 9; ++c) {
            CHECK(s(r, c) >= 0.0);
            CHECK(s(r, c) <= 1.0);
            sum += s(r, c);
        }
        CHECK(std::fabs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("named activations hit their fixed points") {
    const Tensor z = Tensor::vector({0.0});
    CHECK(elementwise(z, Activation::sigmoid)[0] == 0.5);
    CHECK(elementwise(z, Activation::tanh)[0] == 0.0);
    CHECK(elementwise(Tensor::vector({-2.0}), Activation::relu)[0] == 0.0);
    CHECK(elementwise(Tensor::vector({-2.0}), Activation::linear)[0] == -2.0);
}

TEST_CASE("sigmoid symmetry identity on sampled points") {
    Rng rng(23);
    for (int k = 0; k < 50; ++k) {
        const double x = rng.uniform(-8.0, 8.0);
        const double s1 = elementwise(Tensor::vector({x}), Activation::sigmoid)[0];
        const double s2 = elementwise(Tensor::vector({-x}), Activation::sigmoid)[0];
        CHECK(std::fabs(s1 + s2 - 1.0) < 1e-12);
    }
}

TEST_CASE("unknown activation name raises a config error") {
    CHECK_THROWS_AS(activation_from_name("swish"), Error);
    CHECK(activation_from_name("tanh") == Activation::tanh);
}

TEST_CASE("non-finite values surface as errors") {
    Tensor t = Tensor::vector({1.0, 2.0});
    CHECK(t.all_finite());
    t[1] = std::nan("");
    CHECK_FALSE(t.all_finite());
    CHECK_THROWS_AS(t.require_finite("unit test"), Error);
}

TEST_CASE("arithmetic helpers require matching shapes") {
    Tensor a({2, 2}), b({2, 2});
    a[0] = 1.0;
    b[3] = 2.0;
    CHECK((a + b)[0] == 1.0);
    CHECK((a - b)[3] == -2.0);
    CHECK(hadamard(a, b)[0] == 0.0);
    CHECK(scaled(b, 2.0)[3] == 4.0);
    add_in_place(a, b);
    CHECK(a[3] == 2.0);
    axpy_in_place(a, -1.0, b);
    CHECK(a[3] == 0.0);
    CHECK_THROWS_AS(a + Tensor({4}), Error);
    CHECK_THROWS_AS(hadamard(a, Tensor({2, 3})), Error);
}

TEST_CASE("transpose is an involution") {
    Rng rng(5);
    Tensor a({3, 5});
    oracle::fill_uniform(a, rng, -1.0, 1.0);
    const Tensor tt = transpose(transpose(a));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == tt[i]);
    CHECK(transpose(a).shape()[0] == 5);
}
