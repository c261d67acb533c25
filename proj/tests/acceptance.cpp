// Acceptance gate: ten go/no-go checks with pinned tolerances. Each criterion
// prints exactly one PASS/FAIL line with the measured numbers; the exit code
// is the number of failures. Run without arguments for the full gate, or pass
// criterion numbers to run a subset, e.g. `acceptance 2 5 10`.
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "loadcast/checkpoint.hpp"
#include "loadcast/dataio.hpp"
#include "loadcast/error.hpp"
#include "loadcast/layers.hpp"
#include "loadcast/metrics.hpp"
#include "loadcast/model.hpp"
#include "loadcast/pso.hpp"
#include "loadcast/rng.hpp"
#include "loadcast/training.hpp"
#include "support/oracles.hpp"

using namespace loadcast;
namespace fs = std::filesystem;

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof(buf), pattern, args);
    va_end(args);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

Tensor coeffs_like(const Tensor& t, Rng& rng) {
    Tensor c(t.shape());
    oracle::fill_uniform(c, rng, -1.0, 1.0);
    return c;
}

double project(const Tensor& t, const Tensor& c) {
    double acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) acc += t[i] * c[i];
    return acc;
}

nn::LstmParams random_lstm(std::size_t hidden, std::size_t input, Rng& rng) {
    nn::LstmParams p = nn::lstm_zeros(hidden, input);
    for (Tensor* t : {&p.w_f, &p.w_i, &p.w_c, &p.w_o, &p.b_f, &p.b_i, &p.b_c, &p.b_o}) {
        oracle::fill_uniform(*t, rng, -0.6, 0.6);
    }
    return p;
}

void fd_lstm_params(nn::LstmParams& p, const nn::LstmParams& g,
                    const std::function<double()>& loss, double step, oracle::FdReport& rep) {
    oracle::fd_check_tensor(p.w_f, g.w_f, loss, step, rep);
    oracle::fd_check_tensor(p.w_i, g.w_i, loss, step, rep);
    oracle::fd_check_tensor(p.w_c, g.w_c, loss, step, rep);
    oracle::fd_check_tensor(p.w_o, g.w_o, loss, step, rep);
    oracle::fd_check_tensor(p.b_f, g.b_f, loss, step, rep);
    oracle::fd_check_tensor(p.b_i, g.b_i, loss, step, rep);
    oracle::fd_check_tensor(p.b_c, g.b_c, loss, step, rep);
    oracle::fd_check_tensor(p.b_o, g.b_o, loss, step, rep);
}

model::ArchitectureConfig small_arch() {
    model::ArchitectureConfig c;
    c.lookback_window = 6;
    c.input_features = 1;
    c.conv_filters = 2;
    c.conv_kernel = 2;
    c.lstm1_hidden = 2;
    c.lstm2_hidden = 2;
    c.lstm3_hidden = 2;
    c.attn_heads = 1;
    c.attn_key_dim = 2;
    c.dropout_rate = 0.0;
    return c;
}

// ---------------------------------------------------------------------------
// Criterion 1: published accuracy figures are reference targets only.

Outcome criterion_1() {
    return {true,
            "externally reported accuracy figures are reference targets only (no benchmark "
            "dataset snapshot is bundled); executable substitutes are criteria 2-10"};
}

// ---------------------------------------------------------------------------
// Criterion 2: finite-difference gradient suite, every layer < 1e-4 and the
// assembled model < 1e-3, in under two minutes.

Outcome criterion_2() {
    const double t0 = now_seconds();
    const double step = 1e-5;
    Rng rng(4242);
    oracle::FdReport layers;

    {  // conv1d
        nn::Conv1dParams p = nn::conv1d_zeros(2, 2, 2, 1);
        oracle::fill_uniform(p.filters, rng, -1.0, 1.0);
        oracle::fill_uniform(p.bias, rng, -1.0, 1.0);
        Tensor x({2, 6});
        oracle::fill_uniform(x, rng, -1.0, 1.0);
        nn::Conv1dCache cache;
        const Tensor y = nn::conv1d_forward(p, x, &cache);
        const Tensor c = coeffs_like(y, rng);
        nn::Conv1dParams g = nn::conv1d_zeros(2, 2, 2, 1);
        const Tensor dx = nn::conv1d_backward(p, cache, c, g);
        const auto loss = [&] { return project(nn::conv1d_forward(p, x, nullptr), c); };
        oracle::fd_check_tensor(p.filters, g.filters, loss, step, layers);
        oracle::fd_check_tensor(p.bias, g.bias, loss, step, layers);
        oracle::fd_check_tensor(x, dx, loss, step, layers);
    }
    {  // maxpool: values spread out so the fd step cannot flip an argmax
        Tensor x({2, 6});
        oracle::fill_uniform(x, rng, -5.0, 5.0);
        nn::MaxPool1dCache cache;
        const Tensor y = nn::maxpool1d_forward(x, 2, 2, &cache);
        const Tensor c = coeffs_like(y, rng);
        const Tensor dx = nn::maxpool1d_backward(cache, c);
        const auto loss = [&] { return project(nn::maxpool1d_forward(x, 2, 2, nullptr), c); };
        oracle::fd_check_tensor(x, dx, loss, step, layers);
    }
    {  // dense (tanh keeps the loss smooth)
        nn::DenseParams p = nn::dense_zeros(3, 4, Activation::tanh);
        oracle::fill_uniform(p.w, rng, -1.0, 1.0);
        oracle::fill_uniform(p.b, rng, -1.0, 1.0);
        Tensor x({4});
        oracle::fill_uniform(x, rng, -1.0, 1.0);
        nn::DenseCache cache;
        const Tensor y = nn::dense_forward(p, x, &cache);
        const Tensor c = coeffs_like(y, rng);
        nn::DenseParams g = nn::dense_zeros(3, 4, Activation::tanh);
        const Tensor dx = nn::dense_backward(p, cache, c, g);
        const auto loss = [&] { return project(nn::dense_forward(p, x, nullptr), c); };
        oracle::fd_check_tensor(p.w, g.w, loss, step, layers);
        oracle::fd_check_tensor(p.b, g.b, loss, step, layers);
        oracle::fd_check_tensor(x, dx, loss, step, layers);
    }
    {  // layer norm
        nn::LayerNormParams p = nn::layer_norm_identity(4);
        oracle::fill_uniform(p.gain, rng, 0.5, 1.5);
        oracle::fill_uniform(p.shift, rng, -0.5, 0.5);
        Tensor x({3, 4});
        oracle::fill_uniform(x, rng, -1.0, 1.0);
        nn::LayerNormCache cache;
        const Tensor y = nn::layer_norm_forward(p, x, &cache);
        const Tensor c = coeffs_like(y, rng);
        nn::LayerNormParams g = nn::layer_norm_zeros(4);
        const Tensor dx = nn::layer_norm_backward(p, cache, c, g);
        const auto loss = [&] { return project(nn::layer_norm_forward(p, x, nullptr), c); };
        oracle::fd_check_tensor(p.gain, g.gain, loss, step, layers);
        oracle::fd_check_tensor(p.shift, g.shift, loss, step, layers);
        oracle::fd_check_tensor(x, dx, loss, step, layers);
    }
    {  // dropout with the mask pinned by reseeding
        Tensor x({4, 5});
        oracle::fill_uniform(x, rng, -1.0, 1.0);
        Rng mask_rng(7);
        nn::DropoutCache cache;
        const Tensor y = nn::dropout_forward(x, 0.3, true, mask_rng, &cache);
        const Tensor c = coeffs_like(y, rng);
        const Tensor dx = nn::dropout_backward(cache, c);
        const auto loss = [&] {
            Rng again(7);
            return project(nn::dropout_forward(x, 0.3, true, again, nullptr), c);
        };
        oracle::fd_check_tensor(x, dx, loss, step, layers);
    }
    {  // lstm cell chained over 3 timesteps
        nn::LstmParams p = random_lstm(2, 3, rng);
        Tensor x1({3}), x2({3}), x3({3});
        for (Tensor* t : {&x1, &x2, &x3}) oracle::fill_uniform(*t, rng, -1.0, 1.0);
        const auto run = [&](nn::LstmCellCache* c1, nn::LstmCellCache* c2,
                             nn::LstmCellCache* c3) {
            nn::LstmState s = nn::lstm_initial_state(2);
            s = nn::lstm_cell_forward(p, x1, s, c1);
            s = nn::lstm_cell_forward(p, x2, s, c2);
            return nn::lstm_cell_forward(p, x3, s, c3);
        };
        nn::LstmCellCache c1, c2, c3;
        const nn::LstmState last = run(&c1, &c2, &c3);
        Tensor ch = coeffs_like(last.h, rng), cc = coeffs_like(last.c, rng);
        nn::LstmParams g = nn::lstm_zeros(2, 3);
        const auto g3 = nn::lstm_cell_backward(p, c3, ch, cc, g);
        const auto g2 = nn::lstm_cell_backward(p, c2, g3.dh_prev, g3.dc_prev, g);
        const auto g1 = nn::lstm_cell_backward(p, c1, g2.dh_prev, g2.dc_prev, g);
        const auto loss = [&] {
            const nn::LstmState s = run(nullptr, nullptr, nullptr);
            return project(s.h, ch) + project(s.c, cc);
        };
        fd_lstm_params(p, g, loss, step, layers);
        oracle::fd_check_tensor(x1, g1.dx, loss, step, layers);
        oracle::fd_check_tensor(x2, g2.dx, loss, step, layers);
        oracle::fd_check_tensor(x3, g3.dx, loss, step, layers);
    }
    {  // bidirectional lstm over 4 steps
        nn::BilstmParams p = nn::bilstm_zeros(2, 3);
        for (nn::LstmParams* half : {&p.fwd, &p.bwd}) *half = random_lstm(2, 3, rng);
        Tensor x({4, 3});
        oracle::fill_uniform(x, rng, -1.0, 1.0);
        nn::BilstmCache cache;
        const Tensor y = nn::bilstm_forward(p, x, &cache);
        const Tensor c = coeffs_like(y, rng);
        nn::BilstmParams g = nn::bilstm_zeros(2, 3);
        const Tensor dx = nn::bilstm_backward(p, cache, c, g);
        const auto loss = [&] { return project(nn::bilstm_forward(p, x, nullptr), c); };
        fd_lstm_params(p.fwd, g.fwd, loss, step, layers);
        fd_lstm_params(p.bwd, g.bwd, loss, step, layers);
        oracle::fd_check_tensor(x, dx, loss, step, layers);
    }
    {  // multi-head attention
        nn::AttentionParams p = nn::attention_zeros(2, 4, 2);
        for (Tensor* t : {&p.w_q, &p.w_k, &p.w_v, &p.w_o}) oracle::fill_uniform(*t, rng, -0.7, 0.7);
        Tensor x({3, 4});
        oracle::fill_uniform(x, rng, -1.0, 1.0);
        nn::AttentionCache cache;
        const Tensor y = nn::attention_forward(p, x, &cache);
        const Tensor c = coeffs_like(y, rng);
        nn::AttentionParams g = nn::attention_zeros(2, 4, 2);
        const Tensor dx = nn::attention_backward(p, cache, c, g);
        const auto loss = [&] { return project(nn::attention_forward(p, x, nullptr), c); };
        oracle::fd_check_tensor(p.w_q, g.w_q, loss, step, layers);
        oracle::fd_check_tensor(p.w_k, g.w_k, loss, step, layers);
        oracle::fd_check_tensor(p.w_v, g.w_v, loss, step, layers);
        oracle::fd_check_tensor(p.w_o, g.w_o, loss, step, layers);
        oracle::fd_check_tensor(x, dx, loss, step, layers);
    }

    // Full assembled model, all parameters plus the input window.
    oracle::FdReport full;
    {
        Rng build_rng(99);
        model::Model m = model::build(small_arch(), InitScheme::xavier, build_rng);
        Tensor w({6, 1});
        oracle::fill_uniform(w, rng, -0.8, 0.8);
        Rng fwd_rng(0);
        model::ModelCache cache;
        (void)model::forward(m, w, false, fwd_rng, &cache);
        model::Model grads = model::zeros_like(m);
        const Tensor dw = model::backward(m, cache, 1.0, grads);
        const auto loss = [&] {
            Rng r(0);
            return model::forward(m, w, false, r, nullptr);
        };
        std::vector<Tensor*> params, analytic;
        model::for_each_param(m, [&](const std::string&, Tensor& t) { params.push_back(&t); });
        model::for_each_param(grads,
                              [&](const std::string&, Tensor& t) { analytic.push_back(&t); });
        for (std::size_t i = 0; i < params.size(); ++i) {
            oracle::fd_check_tensor(*params[i], *analytic[i], loss, step, full);
        }
        oracle::fd_check_tensor(w, dw, loss, step, full);
    }

    const double elapsed = now_seconds() - t0;
    const bool pass = layers.max_rel < 1e-4 && full.max_rel < 1e-3 && elapsed < 120.0;
    return {pass, fmt("max rel err: layers %.3g (<1e-4, %zu derivatives), model %.3g (<1e-3, "
                      "%zu derivatives), %.1f s (<120 s)",
                      layers.max_rel, layers.checked, full.max_rel, full.checked, elapsed)};
}

// ---------------------------------------------------------------------------
// Criterion 3: forward passes match brute-force expansions on 100 random
// instances each, to < 1e-12.

Outcome criterion_3() {
    Rng rng(300);
    double worst = 0.0;
    const auto track = [&](double got, double want) {
        worst = std::max(worst, std::fabs(got - want));
    };

    for (int i = 0; i < 100; ++i) {  // conv1d
        const std::size_t c_out = 1 + rng.below(3), c_in = 1 + rng.below(3),
                          klen = 1 + rng.below(3), stride = 1 + rng.below(2);
        const std::size_t time = klen + rng.below(6);
        nn::Conv1dParams p = nn::conv1d_zeros(c_out, c_in, klen, stride);
        oracle::fill_uniform(p.filters, rng, -2.0, 2.0);
        oracle::fill_uniform(p.bias, rng, -2.0, 2.0);
        Tensor x({c_in, time});
        oracle::fill_uniform(x, rng, -2.0, 2.0);
        const Tensor y = nn::conv1d_forward(p, x, nullptr);
        const auto want = oracle::conv1d(x, p.filters, p.bias, stride);
        for (std::size_t o = 0; o < want.size(); ++o)
            for (std::size_t t = 0; t < want[o].size(); ++t) track(y(o, t), want[o][t]);
    }

    for (int i = 0; i < 100; ++i) {  // lstm cell
        const std::size_t hidden = 1 + rng.below(4), input = 1 + rng.below(4);
        nn::LstmParams p = random_lstm(hidden, input, rng);
        Tensor x({input});
        oracle::fill_uniform(x, rng, -1.5, 1.5);
        nn::LstmState prev = nn::lstm_initial_state(hidden);
        oracle::fill_uniform(prev.h, rng, -1.0, 1.0);
        oracle::fill_uniform(prev.c, rng, -1.0, 1.0);
        const nn::LstmState s = nn::lstm_cell_forward(p, x, prev, nullptr);
        std::vector<double> xv(x.size()), hv(prev.h.size()), cv(prev.c.size());
        for (std::size_t j = 0; j < x.size(); ++j) xv[j] = x[j];
        for (std::size_t j = 0; j < prev.h.size(); ++j) hv[j] = prev.h[j];
        for (std::size_t j = 0; j < prev.c.size(); ++j) cv[j] = prev.c[j];
        const auto want = oracle::lstm_cell(p.w_f, p.w_i, p.w_c, p.w_o, p.b_f, p.b_i, p.b_c,
                                            p.b_o, xv, hv, cv);
        for (std::size_t j = 0; j < hidden; ++j) {
            track(s.h[j], want.h[j]);
            track(s.c[j], want.c[j]);
        }
    }

    for (int i = 0; i < 100; ++i) {  // multi-head attention
        const std::size_t heads = 1 + rng.below(3), d_k = 1 + rng.below(3),
                          d_model = 1 + rng.below(4), time = 1 + rng.below(5);
        nn::AttentionParams p = nn::attention_zeros(heads, d_model, d_k);
        for (Tensor* t : {&p.w_q, &p.w_k, &p.w_v, &p.w_o}) oracle::fill_uniform(*t, rng, -1.0, 1.0);
        Tensor x({time, d_model});
        oracle::fill_uniform(x, rng, -1.5, 1.5);
        const Tensor y = nn::attention_forward(p, x, nullptr);
        const auto want = oracle::mha(x, p.w_q, p.w_k, p.w_v, p.w_o);
        for (std::size_t t = 0; t < time; ++t)
            for (std::size_t m = 0; m < d_model; ++m) track(y(t, m), want[t][m]);
    }

    return {worst < 1e-12,
            fmt("conv1d, lstm cell and attention vs brute-force expansions: max abs diff %.3g "
                "(<1e-12), 100 random instances each",
                worst)};
}

// ---------------------------------------------------------------------------
// Criterion 4: metric oracles on 1000 random vectors, plus the exact spot
// value MAPE([100],[98]) == 2).

Outcome criterion_4() {
    Rng rng(400);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = 2 + rng.below(49);
        std::vector<double> y(n), yhat(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double sign = rng.below(2) == 0 ? -1.0 : 1.0;
            y[j] = sign * (0.5 + 9.5 * rng.uniform());
            yhat[j] = y[j] + 3.0 * (rng.uniform() - 0.5);
        }
        y[0] += 1.0;  // de-constant guard; keeps |y[0]| >= 0.5 too
        const auto rep = metrics::evaluate(y, yhat);
        worst = std::max(worst, std::fabs(rep.r2 - oracle::r_squared(y, yhat)));
        worst = std::max(worst, std::fabs(rep.mape_percent - oracle::mape_percent(y, yhat)));
        worst = std::max(worst, std::fabs(rep.mae - oracle::mae(y, yhat)));
    }
    const bool exact = metrics::mape_percent({100.0}, {98.0}) == 2.0;
    return {worst < 1e-12 && exact,
            fmt("r2/MAPE/MAE vs direct formulas on 1000 random vectors: max abs diff %.3g "
                "(<1e-12); MAPE([100],[98]) == 2 exactly: %s",
                worst, exact ? "yes" : "NO")};
}

// ---------------------------------------------------------------------------
// Criterion 5: swarm convergence on the 5-dimensional sphere.

Outcome criterion_5() {
    const double t0 = now_seconds();
    pso::SearchSpace space;
    for (int d = 0; d < 5; ++d) {
        space.dims.push_back({pso::Dimension::Kind::continuous, "x" + std::to_string(d),
                              -5.0, 5.0, {}});
    }
    const auto sphere = [](const std::vector<double>& x) {
        double acc = 0.0;
        for (double v : x) acc += v * v;
        return acc;
    };

    int converged = 0;
    bool monotone = true;
    double worst_best = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        pso::SwarmConfig cfg;
        cfg.swarm_size = 20;
        cfg.max_iterations = 100;
        cfg.seed = seed;
        const auto result = pso::optimize_positions(space, sphere, cfg);
        converged += result.best_fitness < 1e-3;
        worst_best = std::max(worst_best, result.best_fitness);
        for (std::size_t i = 1; i < result.gbest_trace.size(); ++i) {
            monotone = monotone && result.gbest_trace[i] <= result.gbest_trace[i - 1];
        }
    }
    const double elapsed = now_seconds() - t0;
    const bool pass = converged == 10 && monotone && elapsed < 10.0;
    return {pass, fmt("sphere in 5 dims, 20 particles x 100 iterations: gbest < 1e-3 for %d/10 "
                      "seeds (worst %.3g), traces monotone: %s, %.2f s (<10 s)",
                      converged, worst_best, monotone ? "yes" : "NO", elapsed)};
}

// ---------------------------------------------------------------------------
// Criterion 6: recover a planted hyperparameter point from a distance fitness.

Outcome criterion_6() {
    const auto space = pso::hyperparameter_space();
    train::HyperParams target;
    target.learning_rate = 0.042;
    target.batch_size = 77;
    target.epochs = 2222;
    target.init_scheme = InitScheme::he;
    target.loss_metric = train::LossMetric::mape;

    const auto distance = [&](const train::HyperParams& hp) {
        const double d_lr = (hp.learning_rate - target.learning_rate) / 0.099;
        const double d_batch = (static_cast<double>(hp.batch_size) - 77.0) / 127.0;
        const double d_epochs = (static_cast<double>(hp.epochs) - 2222.0) / 4900.0;
        const double d_init = hp.init_scheme == target.init_scheme ? 0.0 : 1.0;
        const double d_loss = hp.loss_metric == target.loss_metric ? 0.0 : 1.0;
        return std::sqrt(d_lr * d_lr + d_batch * d_batch + d_epochs * d_epochs + d_init + d_loss);
    };

    int recovered = 0;
    std::size_t worst_batch_err = 0, worst_epoch_err = 0;
    double worst_lr_err = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        pso::SwarmConfig cfg;
        cfg.swarm_size = 24;
        cfg.max_iterations = 50;
        cfg.seed = seed;
        const auto result = pso::optimize(space, distance, cfg);
        const auto& best = result.best;
        const auto diff = [](std::size_t a, std::size_t b) { return a > b ? a - b : b - a; };
        const double lr_err = std::fabs(best.learning_rate - target.learning_rate);
        const std::size_t batch_err = diff(best.batch_size, target.batch_size);
        const std::size_t epoch_err = diff(best.epochs, target.epochs);
        const bool ok = best.init_scheme == target.init_scheme &&
                        best.loss_metric == target.loss_metric && lr_err <= 0.00099 &&
                        batch_err <= 1 && epoch_err <= 1;
        recovered += ok;
        worst_lr_err = std::max(worst_lr_err, lr_err);
        worst_batch_err = std::max(worst_batch_err, batch_err);
        worst_epoch_err = std::max(worst_epoch_err, epoch_err);
    }
    return {recovered >= 9,
            fmt("planted point recovered within decode resolution (exact categorical, int +-1, "
                "lr +-1%% of range) for %d/10 seeds in <=50 iterations; worst errs: lr %.2g, "
                "batch %zu, epochs %zu",
                recovered, worst_lr_err, worst_batch_err, worst_epoch_err)};
}

// ---------------------------------------------------------------------------
// Criteria 7 and 8 share the 60-day synthetic benchmark set.

const data::WindowedDataset& benchmark_dataset() {
    static const data::WindowedDataset ds = [] {
        const auto series = data::synthetic_load(60, 1234);
        return data::build_dataset(series, model::ArchitectureConfig{}.lookback_window);
    }();
    return ds;
}

Outcome criterion_7() {
    const double t0 = now_seconds();
    const auto& ds = benchmark_dataset();
    const auto test = ds.test_range();

    const auto denorm_all = [&](const std::vector<double>& v) {
        std::vector<double> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = ds.stats.denorm_load(v[i]);
        return out;
    };
    std::vector<double> y_test(ds.y.begin() + static_cast<std::ptrdiff_t>(test.first),
                               ds.y.begin() + static_cast<std::ptrdiff_t>(test.second));
    y_test = denorm_all(y_test);
    const double persistence_mape =
        oracle::mape_percent(y_test, denorm_all(data::persistence_forecast(ds, test)));

    int beat = 0;
    std::string per_seed;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const model::ArchitectureConfig arch;  // stock layout
        const train::HyperParams hp;           // stock hyperparameters, epochs = 150
        Rng rng(seed);
        model::Model m = train::build_for_loss(arch, hp, rng);
        train::TrainOptions opts;
        opts.epoch_override = 150;
        (void)train::train(m, ds, hp, rng, opts);
        const double mape =
            oracle::mape_percent(y_test, denorm_all(train::predict_range(m, ds, test)));
        beat += mape < persistence_mape;
        per_seed += fmt("%s%.2f", per_seed.empty() ? "" : "/", mape);
    }
    const double elapsed = now_seconds() - t0;
    const bool pass = beat == 5 && elapsed < 900.0;
    return {pass, fmt("60-day synthetic set, stock model, 150-epoch budget: test MAPE %s%% vs "
                      "persistence %.2f%% - better for %d/5 seeds, %.0f s (<900 s)",
                      per_seed.c_str(), persistence_mape, beat, elapsed)};
}

Outcome criterion_8() {
    const double t0 = now_seconds();
    const auto& ds = benchmark_dataset();

    std::vector<double> pso_mse, default_mse;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        pso::FitnessContext ctx;
        ctx.dataset = &ds;
        ctx.arch = model::ArchitectureConfig{};
        ctx.epoch_budget = 30;
        ctx.train_seed = seed;
        default_mse.push_back(pso::fitness_of_hyperparams(train::HyperParams{}, ctx));

        pso::SwarmConfig cfg;
        cfg.swarm_size = 8;
        cfg.max_iterations = 10;
        cfg.seed = seed;
        const auto result = pso::optimize(
            pso::hyperparameter_space(),
            [&](const train::HyperParams& hp) { return pso::fitness_of_hyperparams(hp, ctx); },
            cfg);
        pso_mse.push_back(result.best_fitness);
    }
    const auto median3 = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[1];
    };
    const double med_pso = median3(pso_mse), med_default = median3(default_mse);
    const double elapsed = now_seconds() - t0;
    const bool pass = med_pso <= med_default && elapsed < 2700.0;
    return {pass, fmt("swarm 8 x 10 iterations x 30-epoch budget: median val MSE, searched "
                      "%.3g vs stock %.3g over 3 seeds, %.0f s (<2700 s)",
                      med_pso, med_default, elapsed)};
}

// ---------------------------------------------------------------------------
// Criterion 9: the compare command is deterministic byte for byte.

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Outcome criterion_9() {
#ifndef LOADCAST_CLI_PATH
    return {false, "built without LOADCAST_CLI_PATH; cannot drive the command line"};
#else
    const fs::path root =
        fs::temp_directory_path() / ("loadcast_accept_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path config = root / "tiny.conf";
    {
        std::ofstream out(config);
        out << "[model]\nlookback = 6\nconv_filters = 2\nconv_kernel = 2\nlstm1_hidden = 2\n"
               "lstm2_hidden = 2\nlstm3_hidden = 2\nattn_heads = 1\nattn_key_dim = 2\n"
               "dropout = 0.0\n";
    }
    const auto run = [&](const std::string& out_dir) {
        const std::string cmd = std::string(LOADCAST_CLI_PATH) + " compare --config " +
                                config.string() +
                                " --data synthetic --days 3 --seed 3 --swarm-size 4 "
                                "--iterations 2 --epoch-budget 2 --out-dir " +
                                out_dir + " >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return status != -1 && WIFEXITED(status) && WEXITSTATUS(status) == 0;
    };
    if (!run((root / "a").string()) || !run((root / "b").string())) {
        return {false, "compare command did not exit cleanly"};
    }
    bool identical = true;
    for (const char* name : {"compare.csv", "compare.json", "compare.svg"}) {
        identical = identical && slurp(root / "a" / name) == slurp(root / "b" / name) &&
                    !slurp(root / "a" / name).empty();
    }
    return {identical, fmt("two compare runs with one seed: csv/json/svg byte-identical: %s",
                           identical ? "yes" : "NO")};
#endif
}

// ---------------------------------------------------------------------------
// Criterion 10: checkpoint portability.

std::string encode_doubles_ref(const std::vector<double>& values) {
    static const std::string tbl =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::vector<std::uint8_t> bytes;
    for (const double v : values) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &v, sizeof bits);
        for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
    }
    std::string out;
    for (std::size_t i = 0; i < bytes.size(); i += 3) {
        std::uint32_t chunk = 0;
        std::size_t have = 0;
        for (std::size_t k = 0; k < 3; ++k) {
            chunk <<= 8;
            if (i + k < bytes.size()) {
                chunk |= bytes[i + k];
                ++have;
            }
        }
        for (std::size_t k = 0; k < 4; ++k) {
            out += k <= have ? tbl[(chunk >> (18 - 6 * k)) & 63] : '=';
        }
    }
    return out;
}

Outcome criterion_10() {
    // Round trip: serialized and restored models must agree bit for bit.
    train::HyperParams hp;
    data::NormStats stats;
    stats.names = {"load"};
    stats.col_min = {200.0};
    stats.col_max = {1800.0};
    Rng build_rng(5150);
    const model::Model m = train::build_for_loss(small_arch(), hp, build_rng);
    const auto cp = ckpt::deserialize(ckpt::serialize(m, hp, stats, 5150));

    std::size_t exact = 0;
    Rng data_rng(51);
    Rng fwd_rng(0);
    for (int i = 0; i < 100; ++i) {
        Tensor w({6, 1});
        oracle::fill_uniform(w, data_rng, -1.0, 2.0);
        exact += model::forward(cp.model, w, false, fwd_rng, nullptr) ==
                 model::forward(m, w, false, fwd_rng, nullptr);
    }

    // A checkpoint assembled by hand from the documented layout must load and
    // predict exactly what the equations say.
    const std::vector<double> w_f{0.5, -0.3}, w_i{0.2, 0.4}, w_c{0.7, 0.3}, w_o{-0.4, 0.6};
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["seed"] = 7;
    j["architecture"] = {{"lookback_window", 2}, {"input_features", 1},  {"conv_filters", 1},
                         {"conv_kernel", 1},     {"lstm1_hidden", 1},    {"lstm2_hidden", 1},
                         {"lstm3_hidden", 1},    {"attn_heads", 1},      {"attn_key_dim", 1},
                         {"dropout_rate", 0.0},  {"variant", "vanilla-lstm"}};
    j["hyperparams"] = {{"learning_rate", 0.005},
                        {"batch_size", 32},
                        {"epochs", 150},
                        {"init_scheme", "xavier"},
                        {"loss_metric", "mse"}};
    j["normalization"] = {{"columns", {"load"}}, {"min", {0.0}}, {"max", {1.0}}};
    const auto tensor = [](std::vector<std::size_t> shape, const std::vector<double>& values) {
        return nlohmann::ordered_json{{"shape", shape}, {"data", encode_doubles_ref(values)}};
    };
    j["tensors"] = {{"lstm3.w_f", tensor({1, 2}, w_f)},  {"lstm3.w_i", tensor({1, 2}, w_i)},
                    {"lstm3.w_c", tensor({1, 2}, w_c)},  {"lstm3.w_o", tensor({1, 2}, w_o)},
                    {"lstm3.b_f", tensor({1}, {0.1})},   {"lstm3.b_i", tensor({1}, {-0.2})},
                    {"lstm3.b_c", tensor({1}, {0.0})},   {"lstm3.b_o", tensor({1}, {0.2})},
                    {"head.w", tensor({1, 1}, {2.0})},   {"head.b", tensor({1}, {0.5})}};

    bool hand_ok = false;
    double hand_diff = std::numeric_limits<double>::infinity();
    try {
        const auto hand = ckpt::deserialize(j.dump());
        const double x1 = 0.3, x2 = -0.7;
        Rng rng(0);
        const double got =
            model::forward(hand.model, Tensor::matrix(2, 1, {x1, x2}), false, rng, nullptr);
        const Tensor tw_f = Tensor::matrix(1, 2, w_f), tw_i = Tensor::matrix(1, 2, w_i);
        const Tensor tw_c = Tensor::matrix(1, 2, w_c), tw_o = Tensor::matrix(1, 2, w_o);
        const auto s1 =
            oracle::lstm_cell(tw_f, tw_i, tw_c, tw_o, Tensor::vector({0.1}),
                              Tensor::vector({-0.2}), Tensor::vector({0.0}),
                              Tensor::vector({0.2}), {x1}, {0.0}, {0.0});
        const auto s2 =
            oracle::lstm_cell(tw_f, tw_i, tw_c, tw_o, Tensor::vector({0.1}),
                              Tensor::vector({-0.2}), Tensor::vector({0.0}),
                              Tensor::vector({0.2}), {x2}, s1.h, s1.c);
        hand_diff = std::fabs(got - (2.0 * s2.h[0] + 0.5));
        hand_ok = hand_diff < 1e-12;
    } catch (const Error& e) {
        return {false, fmt("hand-written checkpoint rejected: %s", e.what())};
    }

    return {exact == 100 && hand_ok,
            fmt("save->load->forward bit-exact on %zu/100 random windows; hand-written "
                "checkpoint predicts per the cell equations (diff %.3g < 1e-12)",
                exact, hand_diff)};
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
    const auto selected = [&](int n) {
        return wanted.empty() || std::find(wanted.begin(), wanted.end(), n) != wanted.end();
    };

    const std::pair<int, Outcome (*)()> criteria[] = {
        {1, criterion_1}, {2, criterion_2}, {3, criterion_3}, {4, criterion_4},
        {5, criterion_5}, {6, criterion_6}, {7, criterion_7}, {8, criterion_8},
        {9, criterion_9}, {10, criterion_10}};

    int failures = 0, ran = 0;
    for (const auto& [number, fn] : criteria) {
        if (!selected(number)) continue;
        ++ran;
        Outcome outcome;
        try {
            outcome = fn();
        } catch (const std::exception& e) {
            outcome = {false, std::string("unexpected exception: ") + e.what()};
        }
        failures += !outcome.pass;
        std::cout << (outcome.pass ? "PASS" : "FAIL") << " criterion " << number << ": "
                  << outcome.detail << std::endl;
    }
    std::cout << "acceptance: " << (ran - failures) << "/" << ran << " criteria passed"
              << std::endl;
    return failures;
}
