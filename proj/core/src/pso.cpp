#include "loadcast/pso.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "json.hpp"
#include "loadcast/error.hpp"

namespace loadcast::pso {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double sanitize(double fitness) {
    return std::isnan(fitness) ? std::numeric_limits<double>::infinity() : fitness;
}

std::size_t decode_int(const Dimension& dim, double v) {
    double rounded = std::floor(v + 0.5);  // half-up, matching the documented examples
    rounded = std::clamp(rounded, dim.lo, dim.hi);
    return static_cast<std::size_t>(rounded);
}

std::size_t decode_choice(const Dimension& dim, double v) {
    const auto k = dim.choices.size();
    auto idx = static_cast<std::size_t>(std::floor(v * static_cast<double>(k)));
    return std::min(idx, k - 1);  // v == 1.0 lands in the last bucket
}

void update_bests(Swarm& swarm, const std::vector<double>& fitness) {
    if (fitness.size() != swarm.particles.size()) {
        throw errors::shape("swarm step got " + std::to_string(fitness.size()) +
                            " fitness values for " + std::to_string(swarm.particles.size()) +
                            " particles");
    }
    for (std::size_t p = 0; p < swarm.particles.size(); ++p) {
        auto& particle = swarm.particles[p];
        const double f = sanitize(fitness[p]);
        if (f < particle.best_fitness) {
            particle.best_fitness = f;
            particle.best_position = particle.position;
        }
        if (f < swarm.best_fitness) {
            swarm.best_fitness = f;
            swarm.best_position = particle.position;
        }
    }
}

void move_particles(Swarm& swarm, const SearchSpace& space, const SwarmConfig& cfg, Rng& rng) {
    const auto n_dims = space.dims.size();
    for (auto& particle : swarm.particles) {
        for (std::size_t d = 0; d < n_dims; ++d) {
            const auto& dim = space.dims[d];
            const double r1 = rng.uniform();
            const double r2 = rng.uniform();
            double v = cfg.inertia * particle.velocity[d] +
                       cfg.cognitive * r1 * (particle.best_position[d] - particle.position[d]) +
                       cfg.social * r2 * (swarm.best_position[d] - particle.position[d]);
            const double v_max = cfg.velocity_clamp * dim.range();
            v = std::clamp(v, -v_max, v_max);
            particle.velocity[d] = v;
            particle.position[d] = std::clamp(particle.position[d] + v, dim.lo, dim.hi);
        }
    }
}

}  // namespace

SearchSpace hyperparameter_space() {
    SearchSpace space;
    space.dims.push_back({Dimension::Kind::continuous, "learning_rate", 0.001, 0.1, {}});
    space.dims.push_back({Dimension::Kind::integer, "batch_size", 1.0, 128.0, {}});
    space.dims.push_back({Dimension::Kind::integer, "epochs", 100.0, 5000.0, {}});
    space.dims.push_back(
        {Dimension::Kind::categorical, "init_scheme", 0.0, 1.0, {"xavier", "he", "random"}});
    space.dims.push_back(
        {Dimension::Kind::categorical, "loss_metric", 0.0, 1.0, {"mse", "cross-entropy", "mape"}});
    return space;
}

train::HyperParams decode(const std::vector<double>& position, const SearchSpace& space) {
    if (position.size() != space.dims.size()) {
        throw errors::internal("decode got a position of length " +
                               std::to_string(position.size()) + " for a space of " +
                               std::to_string(space.dims.size()) + " dimensions");
    }
    train::HyperParams hp;
    for (std::size_t d = 0; d < space.dims.size(); ++d) {
        const auto& dim = space.dims[d];
        const double v = position[d];
        if (!(v >= dim.lo && v <= dim.hi)) {
            throw errors::internal("position coordinate '" + dim.name + "' = " + format_double(v) +
                                   " is outside [" + format_double(dim.lo) + ", " +
                                   format_double(dim.hi) + "]");
        }
        if (dim.name == "learning_rate") {
            hp.learning_rate = v;
        } else if (dim.name == "batch_size") {
            hp.batch_size = decode_int(dim, v);
        } else if (dim.name == "epochs") {
            hp.epochs = decode_int(dim, v);
        } else if (dim.name == "init_scheme") {
            hp.init_scheme = init_scheme_from_name(dim.choices[decode_choice(dim, v)]);
        } else if (dim.name == "loss_metric") {
            hp.loss_metric = train::loss_metric_from_name(dim.choices[decode_choice(dim, v)]);
        } else {
            throw errors::internal("search space dimension '" + dim.name + "' is not recognized");
        }
    }
    return hp;
}

void SwarmConfig::validate() const {
    if (swarm_size < 2) throw errors::config("swarm_size must be at least 2");
    if (max_iterations < 1) throw errors::config("max_iterations must be at least 1");
    if (!(inertia > 0.0)) throw errors::config("inertia weight must be positive");
    if (!(cognitive > 0.0)) throw errors::config("cognitive coefficient must be positive");
    if (!(social > 0.0)) throw errors::config("social coefficient must be positive");
    if (!(velocity_clamp > 0.0)) throw errors::config("velocity_clamp must be positive");
    if (stall_tolerance < 0.0) throw errors::config("stall_tolerance must be non-negative");
}

Swarm init_swarm(const SearchSpace& space, const SwarmConfig& cfg, Rng& rng) {
    if (space.dims.empty()) throw errors::config("search space has no dimensions");
    Swarm swarm;
    swarm.particles.resize(cfg.swarm_size);
    for (auto& particle : swarm.particles) {
        particle.position.resize(space.dims.size());
        for (std::size_t d = 0; d < space.dims.size(); ++d) {
            particle.position[d] = space.dims[d].lo + rng.uniform() * space.dims[d].range();
        }
        particle.velocity.assign(space.dims.size(), 0.0);
        particle.best_position = particle.position;
    }
    swarm.best_position = swarm.particles.front().position;
    return swarm;
}

void step(Swarm& swarm, const SearchSpace& space, const SwarmConfig& cfg,
          const std::vector<double>& fitness, Rng& rng) {
    update_bests(swarm, fitness);
    move_particles(swarm, space, cfg, rng);
}

PsoResult optimize_positions(const SearchSpace& space,
                             const std::function<double(const std::vector<double>&)>& fitness,
                             const SwarmConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    Swarm swarm = init_swarm(space, cfg, rng);

    PsoResult result;
    result.history.reserve(cfg.swarm_size * cfg.max_iterations);
    std::vector<double> values(cfg.swarm_size);
    double previous_best = std::numeric_limits<double>::infinity();
    std::size_t stalled = 0;

    for (std::size_t iter = 1; iter <= cfg.max_iterations; ++iter) {
        for (std::size_t p = 0; p < swarm.particles.size(); ++p) {
            double f;
            try {
                f = sanitize(fitness(swarm.particles[p].position));
            } catch (const std::exception&) {
                f = std::numeric_limits<double>::infinity();
            }
            values[p] = f;
            result.history.push_back({iter, p, swarm.particles[p].position, f});
        }
        step(swarm, space, cfg, values, rng);
        result.gbest_trace.push_back(swarm.best_fitness);
        result.iterations_run = iter;

        if (cfg.stall_window > 0) {
            if (previous_best - swarm.best_fitness > cfg.stall_tolerance) {
                stalled = 0;
            } else {
                ++stalled;
            }
            previous_best = swarm.best_fitness;
            if (stalled >= cfg.stall_window) break;
        }
    }

    result.best_position = swarm.best_position;
    result.best_fitness = swarm.best_fitness;
    return result;
}

SearchResult optimize(const SearchSpace& space,
                      const std::function<double(const train::HyperParams&)>& fitness,
                      const SwarmConfig& cfg) {
    std::map<std::string, double> cache;
    auto cached_fitness = [&](const std::vector<double>& position) {
        const auto hp = decode(position, space);
        std::string key = format_double(hp.learning_rate) + "|" + std::to_string(hp.batch_size) +
                          "|" + std::to_string(hp.epochs) + "|" + to_string(hp.init_scheme) + "|" +
                          train::to_string(hp.loss_metric);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
        double f;
        try {
            f = sanitize(fitness(hp));
        } catch (const std::exception&) {
            f = std::numeric_limits<double>::infinity();
        }
        cache.emplace(std::move(key), f);
        return f;
    };

    PsoResult raw = optimize_positions(space, cached_fitness, cfg);

    SearchResult result;
    result.best = decode(raw.best_position, space);
    result.best_fitness = raw.best_fitness;
    result.gbest_trace = std::move(raw.gbest_trace);
    result.history = std::move(raw.history);
    result.iterations_run = raw.iterations_run;
    return result;
}

double fitness_of_hyperparams(const train::HyperParams& hp, const FitnessContext& ctx) {
    if (ctx.dataset == nullptr) throw errors::internal("fitness context has no dataset");
    try {
        Rng rng(ctx.train_seed);
        model::Model m = train::build_for_loss(ctx.arch, hp, rng);
        train::TrainOptions opts;
        opts.epoch_override = ctx.epoch_budget;
        opts.threads = ctx.threads;
        train::train(m, *ctx.dataset, hp, rng, opts);
        return train::validation_mse(m, *ctx.dataset);
    } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
    }
}

std::string history_csv(const std::vector<EvalRecord>& history, const SearchSpace& space) {
    std::string out = "iteration,particle,learning_rate,batch_size,epochs,init_scheme,loss_metric,fitness\n";
    char buf[256];
    for (const auto& record : history) {
        const auto hp = decode(record.position, space);
        std::snprintf(buf, sizeof(buf), "%zu,%zu,%.17g,%zu,%zu,%s,%s,%.17g\n", record.iteration,
                      record.particle, hp.learning_rate, hp.batch_size, hp.epochs,
                      to_string(hp.init_scheme), train::to_string(hp.loss_metric), record.fitness);
        out += buf;
    }
    return out;
}

std::string to_json(const SearchResult& result) {
    nlohmann::ordered_json j;
    j["best"] = {{"learning_rate", result.best.learning_rate},
                 {"batch_size", result.best.batch_size},
                 {"epochs", result.best.epochs},
                 {"init_scheme", to_string(result.best.init_scheme)},
                 {"loss_metric", train::to_string(result.best.loss_metric)}};
    j["best_fitness"] = result.best_fitness;
    j["iterations_run"] = result.iterations_run;
    j["evaluations"] = result.history.size();
    j["gbest_trace"] = result.gbest_trace;
    return j.dump(2) + "\n";
}

}  // namespace loadcast::pso
