#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace orderlens {

// Deterministic, platform-independent RNG (splitmix64). The standard
// distributions are implementation-defined, so everything that must be
// byte-reproducible across toolchains draws through this.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // [0, n)
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    bool bernoulli(double p) { return next_double() < p; }

    double normal(double mean = 0.0, double stddev = 1.0) {
        // Box-Muller, one value per call (the discarded twin keeps the
        // draw count independent of call sites).
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Geometric number of trials (>= 1) with success probability p.
    std::uint64_t geometric(double p) {
        std::uint64_t k = 1;
        while (!bernoulli(p)) ++k;
        return k;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Independent substream; used for per-patient generation so results do
    // not depend on traversal order.
    Rng fork(std::uint64_t stream_id) {
        std::uint64_t z = state_ ^ (0xA0761D6478BD642FULL + stream_id * 0xE7037ED1A0B428DBULL);
        z = (z ^ (z >> 32)) * 0xD6E8FEB86659FD93ULL;
        return Rng(z ^ (z >> 32));
    }

private:
    std::uint64_t state_;
};

}
