#pragma once

#include <cmath>
#include <cstdint>

namespace shotnoise::stochastic {

// Counter-based stream: (seed, stream id) fully determine the output
// sequence, so replicate i of a batch can be regenerated in isolation and
// parallel shards reproduce independently of scheduling.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : state_(derive(seed, stream_id)) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    // Uniform on the open interval (0,1); never 0 or 1, so logs and
    // inverse CDFs are safe.
    double u01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    // Exponential with the given rate (mean 1/rate); strictly positive.
    double exponential(double rate) { return -std::log(u01()) / rate; }

    // Standard normal via Box-Muller; consumes two uniforms per draw.
    double normal() {
        const double r = std::sqrt(-2.0 * std::log(u01()));
        const double a = 6.28318530717958647692528676655900577 * u01();
        return r * std::cos(a);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream_id) {
        return mix(seed + 0x9E3779B97F4A7C15ull * (stream_id + 1)) ^ mix(~stream_id);
    }

    std::uint64_t state_;
};

} // namespace shotnoise::stochastic
