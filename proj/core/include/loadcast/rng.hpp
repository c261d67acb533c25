#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace loadcast {

/// Deterministic random source used by every stochastic code path (weight
/// init, dropout masks, shuffling, swarm updates).
///
/// The raw stream comes from std::mt19937_64, whose output is fully specified
/// by the C++ standard, so equal seeds give bit-identical draws on every
/// conforming platform. All derived quantities (uniform doubles, normals,
/// bounded integers) are computed here with fixed formulas rather than the
/// implementation-defined standard distributions:
///   uniform():  (next_u64() >> 11) * 2^-53            in [0, 1)
///   normal():   Box-Muller on two uniform draws
///   below(n):   rejection sampling on next_u64()
/// Child generators are seeded with splitmix64 so parallel consumers get
/// independent streams that do not depend on scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const noexcept { return seed_; }

    /// Next raw 64-bit draw of the underlying generator.
    std::uint64_t next_u64();

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi);

    /// Standard normal draw (Box-Muller; consumes two uniforms).
    double normal();

    double normal(double mean, double stddev);

    /// Unbiased uniform integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n);

    /// Independently seeded child generator for the given stream key.
    Rng child(std::uint64_t key) const;

    /// Deterministic Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        if (items.size() < 2) return;
        for (std::size_t i = items.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i + 1));
            std::swap(items[i], items[j]);
        }
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// splitmix64 mixing step; used for deriving child seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace loadcast
