#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace ssar {

// Mixes a base seed with a stream id (splitmix64 finalizer) so independent
// consumers (days, epochs, seeds) draw from decorrelated streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Seeded generator shared by every randomized routine. Same seed, same calls,
// same outputs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    double normal(double mean = 0.0, double sd = 1.0) {
        return std::normal_distribution<double>(mean, sd)(engine_);
    }
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        return std::poisson_distribution<std::uint64_t>(mean)(engine_);
    }
    bool bernoulli(double p) { return std::bernoulli_distribution(p)(engine_); }
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }

    template <typename T>
    void shuffle(std::vector<T>& values) {
        // Fisher-Yates with our own index draws; std::shuffle's algorithm is unspecified.
        for (std::size_t i = values.size(); i > 1; --i) {
            std::swap(values[i - 1], values[index(i)]);
        }
    }

    // 0..n-1 in random order.
    std::vector<std::size_t> permutation(std::size_t n);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace ssar
