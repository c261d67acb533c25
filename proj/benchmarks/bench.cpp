#include <benchmark/benchmark.h>

#include <vector>

#include "loadcast/dataio.hpp"
#include "loadcast/layers.hpp"
#include "loadcast/metrics.hpp"
#include "loadcast/model.hpp"
#include "loadcast/pso.hpp"
#include "loadcast/rng.hpp"
#include "loadcast/training.hpp"

using namespace loadcast;

namespace {

void fill(Tensor& t, Rng& rng, double lo, double hi) {
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
}

nn::LstmParams random_lstm(std::size_t hidden, std::size_t input, Rng& rng) {
    nn::LstmParams p = nn::lstm_zeros(hidden, input);
    for (Tensor* t : {&p.w_f, &p.w_i, &p.w_c, &p.w_o, &p.b_f, &p.b_i, &p.b_c, &p.b_o}) {
        fill(*t, rng, -0.3, 0.3);
    }
    return p;
}

// Dimensions mirror the stock architecture so the numbers track what training
// actually pays per window.

void bm_conv1d_forward(benchmark::State& state) {
    Rng rng(1);
    nn::Conv1dParams p = nn::conv1d_zeros(16, 1, 3, 1);
    fill(p.filters, rng, -0.5, 0.5);
    fill(p.bias, rng, -0.5, 0.5);
    Tensor x({1, 24});
    fill(x, rng, 0.0, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(nn::conv1d_forward(p, x, nullptr));
    }
}
BENCHMARK(bm_conv1d_forward);

void bm_bilstm_forward(benchmark::State& state) {
    Rng rng(2);
    nn::BilstmParams p = nn::bilstm_zeros(8, 16);
    p.fwd = random_lstm(8, 16, rng);
    p.bwd = random_lstm(8, 16, rng);
    Tensor x({22, 16});
    fill(x, rng, -1.0, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(nn::bilstm_forward(p, x, nullptr));
    }
}
BENCHMARK(bm_bilstm_forward);

void bm_attention_forward(benchmark::State& state) {
    Rng rng(3);
    nn::AttentionParams p = nn::attention_zeros(2, 16, 8);
    for (Tensor* t : {&p.w_q, &p.w_k, &p.w_v, &p.w_o}) fill(*t, rng, -0.3, 0.3);
    Tensor x({22, 16});
    fill(x, rng, -1.0, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(nn::attention_forward(p, x, nullptr));
    }
}
BENCHMARK(bm_attention_forward);

void bm_model_forward(benchmark::State& state) {
    Rng rng(4);
    const model::Model m = model::build(model::ArchitectureConfig{}, InitScheme::xavier, rng);
    Tensor w({m.config.lookback_window, 1});
    fill(w, rng, 0.0, 1.0);
    Rng fwd(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model::forward(m, w, false, fwd, nullptr));
    }
}
BENCHMARK(bm_model_forward);

void bm_model_forward_backward(benchmark::State& state) {
    Rng rng(5);
    const model::Model m = model::build(model::ArchitectureConfig{}, InitScheme::xavier, rng);
    Tensor w({m.config.lookback_window, 1});
    fill(w, rng, 0.0, 1.0);
    Rng fwd(0);
    model::Model grads = model::zeros_like(m);
    for (auto _ : state) {
        model::ModelCache cache;
        benchmark::DoNotOptimize(model::forward(m, w, false, fwd, &cache));
        benchmark::DoNotOptimize(model::backward(m, cache, 1.0, grads));
    }
}
BENCHMARK(bm_model_forward_backward);

void bm_training_epoch(benchmark::State& state) {
    const auto series = data::synthetic_load(4, 1234);
    const auto ds = data::build_dataset(series, 24);
    train::HyperParams hp;
    hp.batch_size = 16;
    train::TrainOptions opts;
    opts.epoch_override = 1;
    for (auto _ : state) {
        Rng rng(7);
        model::Model m = train::build_for_loss(model::ArchitectureConfig{}, hp, rng);
        benchmark::DoNotOptimize(train::train(m, ds, hp, rng, opts));
    }
}
BENCHMARK(bm_training_epoch)->Unit(benchmark::kMillisecond);

void bm_pso_step(benchmark::State& state) {
    pso::SearchSpace space;
    for (int d = 0; d < 5; ++d) {
        space.dims.push_back(
            {pso::Dimension::Kind::continuous, "x" + std::to_string(d), -5.0, 5.0, {}});
    }
    pso::SwarmConfig cfg;
    cfg.swarm_size = 20;
    Rng rng(9);
    pso::Swarm swarm = pso::init_swarm(space, cfg, rng);
    std::vector<double> fitness(cfg.swarm_size);
    for (auto _ : state) {
        for (std::size_t i = 0; i < swarm.particles.size(); ++i) {
            double acc = 0.0;
            for (double v : swarm.particles[i].position) acc += v * v;
            fitness[i] = acc;
        }
        pso::step(swarm, space, cfg, fitness, rng);
    }
}
BENCHMARK(bm_pso_step);

void bm_metrics_evaluate(benchmark::State& state) {
    Rng rng(11);
    std::vector<double> y(1000), yhat(1000);
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = rng.uniform(500.0, 1500.0);
        yhat[i] = y[i] + rng.uniform(-25.0, 25.0);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(metrics::evaluate(y, yhat));
    }
}
BENCHMARK(bm_metrics_evaluate);

void bm_build_dataset(benchmark::State& state) {
    const auto series = data::synthetic_load(60, 1234);
    for (auto _ : state) {
        benchmark::DoNotOptimize(data::build_dataset(series, 24));
    }
}
BENCHMARK(bm_build_dataset)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
