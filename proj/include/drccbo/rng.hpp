#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace drccbo {

/// Deterministic random stream. std::mt19937_64 supplies the bits; all
/// distributions are implemented here because the standard distribution
/// classes are not portable across library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() {
        return std::ldexp(static_cast<double>(engine_() >> 11), -53);
    }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0)
            throw std::invalid_argument("Rng::uniform_index: n == 0");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    /// Standard normal via Box-Muller; one value per call, no caching, so the
    /// stream position is a pure function of the call count.
    double normal() {
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Index draw from a probability vector (weights sum to 1).
    std::size_t discrete(std::span<const double> weights) {
        const double u = uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc)
                return i;
        }
        return weights.size() - 1;
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace drccbo
