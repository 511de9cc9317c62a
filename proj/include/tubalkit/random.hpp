#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tubalkit {

// Seedable stream of mt19937_64 with its own normal sampler, so draws do not
// depend on the standard library's distribution implementations.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {
        std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream),
                          std::uint32_t(stream >> 32)};
        engine_.seed(seq);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }
    Rng split(std::uint64_t stream) const { return Rng(seed_, stream); }

    std::uint64_t next() { return engine_(); }
    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) { return uniform() < p; }
    double rademacher() { return (engine_() >> 63) ? 1.0 : -1.0; }

    // Marsaglia polar method.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }
    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace tubalkit
