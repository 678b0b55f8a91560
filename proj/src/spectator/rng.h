#ifndef SPECTATOR_RNG_H
#define SPECTATOR_RNG_H

#include <cstdint>
#include <random>

namespace spectator {

/// splitmix64 finalizer.
constexpr uint64_t mix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of the substream `purpose` of Monte Carlo run `run`.
constexpr uint64_t derive_seed(uint64_t master, uint64_t run, uint64_t purpose) {
    return mix64(mix64(mix64(master) ^ run) ^ (purpose * 0xD1B54A32D192ED03ULL));
}

/// Independent substreams owned by one run.
enum class Substream : uint64_t {
    Walk = 1,
    Measure = 2,
    Axis = 3,
    Estimate = 4,
};

/// Deterministic 64-bit stream. Identical seeds give identical draw sequences.
class RngStream {
   public:
    explicit RngStream(uint64_t seed) : engine_(seed) {}
    RngStream(uint64_t master, uint64_t run, Substream purpose)
        : engine_(derive_seed(master, run, static_cast<uint64_t>(purpose))) {}

    double gaussian() { return normal_(engine_); }
    double gaussian(double mean, double stddev) { return mean + stddev * normal_(engine_); }
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    bool bernoulli(double p) { return uniform(0, 1) < p; }
    uint64_t binomial(uint64_t trials, double p) {
        return std::binomial_distribution<uint64_t>(trials, p)(engine_);
    }

    std::mt19937_64 &engine() { return engine_; }

   private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

}  // namespace spectator

#endif
