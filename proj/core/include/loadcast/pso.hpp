#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "loadcast/dataio.hpp"
#include "loadcast/model.hpp"
#include "loadcast/rng.hpp"
#include "loadcast/training.hpp"

namespace loadcast::pso {

/// One coordinate of the search space. Integer and categorical dimensions are
/// relaxed to reals for the canonical update equations and mapped back by
/// decode(): integers round half-up, categoricals bucket [0,1) uniformly.
struct Dimension {
    enum class Kind { continuous, integer, categorical };
    Kind kind = Kind::continuous;
    std::string name;
    double lo = 0.0;
    double hi = 1.0;                   // categorical dims use the relaxed range [0,1]
    std::vector<std::string> choices;  // categorical only

    double range() const { return hi - lo; }
};

struct SearchSpace {
    std::vector<Dimension> dims;
};

/// The canonical five-dimensional hyperparameter space, in fixed order:
/// learning_rate, batch_size, epochs, init_scheme, loss_metric.
SearchSpace hyperparameter_space();

/// Maps a position in the canonical space to hyperparameters. Positions must
/// already be within bounds (updates clamp), otherwise an internal error.
train::HyperParams decode(const std::vector<double>& position, const SearchSpace& space);

struct SwarmConfig {
    std::size_t swarm_size = 20;
    std::size_t max_iterations = 30;
    double inertia = 0.729;     // w
    double cognitive = 1.49445;  // c1
    double social = 1.49445;     // c2
    double velocity_clamp = 0.5;   // max |v| as a fraction of each dimension's range
    double stall_tolerance = 0.0;  // minimum gbest improvement that counts as progress
    std::size_t stall_window = 0;  // stop after this many stalled iterations; 0 disables
    std::uint64_t seed = 0;

    void validate() const;  // swarm_size >= 2; w, c1, c2 > 0
};

struct Particle {
    std::vector<double> position;
    std::vector<double> velocity;
    std::vector<double> best_position;
    double best_fitness = std::numeric_limits<double>::infinity();
};

struct Swarm {
    std::vector<Particle> particles;
    std::vector<double> best_position;
    double best_fitness = std::numeric_limits<double>::infinity();
};

/// Particles start uniformly distributed over the bounds with zero velocity.
Swarm init_swarm(const SearchSpace& space, const SwarmConfig& cfg, Rng& rng);

/// One generation: fold the given fitness values into personal/global bests
/// (strict improvement; NaN counts as +inf), then move every particle by
///   v <- w v + c1 r1 (pbest - x) + c2 r2 (gbest - x);  x <- x + v
/// with velocities clamped to +-clamp*range and positions clamped to bounds.
void step(Swarm& swarm, const SearchSpace& space, const SwarmConfig& cfg,
          const std::vector<double>& fitness, Rng& rng);

/// One fitness evaluation, kept for the search history export.
struct EvalRecord {
    std::size_t iteration = 0;  // 1-based; iteration 1 evaluates the initial positions
    std::size_t particle = 0;
    std::vector<double> position;
    double fitness = std::numeric_limits<double>::infinity();
};

struct PsoResult {
    std::vector<double> best_position;
    double best_fitness = std::numeric_limits<double>::infinity();
    std::vector<double> gbest_trace;  // per iteration, non-increasing
    std::vector<EvalRecord> history;  // swarm_size rows per iteration run
    std::size_t iterations_run = 0;
};

/// Core engine over raw positions. A fitness call that throws or returns NaN
/// scores +inf for that particle; the run always continues.
PsoResult optimize_positions(const SearchSpace& space,
                             const std::function<double(const std::vector<double>&)>& fitness,
                             const SwarmConfig& cfg);

struct SearchResult {
    train::HyperParams best;
    double best_fitness = std::numeric_limits<double>::infinity();
    std::vector<double> gbest_trace;
    std::vector<EvalRecord> history;
    std::size_t iterations_run = 0;
};

/// Hyperparameter search: decode each position and memoize fitness per
/// decoded point (rounding collapses nearby positions, so duplicates are
/// common). The fitness function must be deterministic.
SearchResult optimize(const SearchSpace& space,
                      const std::function<double(const train::HyperParams&)>& fitness,
                      const SwarmConfig& cfg);

/// Everything a model-training fitness evaluation needs. The training seed is
/// fixed for a whole search so fitness is a pure function of the decoded
/// hyperparameters.
struct FitnessContext {
    const data::WindowedDataset* dataset = nullptr;
    model::ArchitectureConfig arch;
    std::size_t epoch_budget = 0;  // 0 honors hp.epochs
    std::uint64_t train_seed = 0;
    int threads = 1;
};

/// Builds a model from hp.init_scheme, trains it with hp, and returns the
/// validation MSE on the normalized scale (the fixed reference metric, so
/// values are comparable across loss choices). A training abort scores +inf.
double fitness_of_hyperparams(const train::HyperParams& hp, const FitnessContext& ctx);

/// History CSV: iteration, particle, decoded hyperparameters, fitness.
std::string history_csv(const std::vector<EvalRecord>& history, const SearchSpace& space);

/// JSON summary of a finished search (best hp, best fitness, iterations).
std::string to_json(const SearchResult& result);

}  // namespace loadcast::pso
