#ifndef SPDTEST_RNG_HPP
#define SPDTEST_RNG_HPP

#include <cmath>
#include <cstdint>

namespace spdtest {

/// splitmix64 output function (Vigna); also used standalone to derive
/// sub-seeds for experiment cells.
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic sub-seed for job `key` under a master seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) {
    return splitmix64_mix(seed ^ splitmix64_mix(key ^ 0xD1B54A32D192ED03ULL));
}

/// Seedable random stream: xoshiro256++ state (period 2^256-1) filled by a
/// splitmix64 chain over (seed, stream_id). The same pair always replays
/// the identical sequence; distinct stream ids give independent streams,
/// one per Monte Carlo replication.
///
/// All distribution transforms are implemented here (not taken from
/// <random>) so sequences are reproducible across standard libraries.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id) {
        std::uint64_t sm = seed ^ splitmix64_mix(stream_id);
        bool all_zero = true;
        for (auto& word : state_) {
            sm += 0x9E3779B97F4A7C15ULL;
            std::uint64_t z = sm;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            word = z ^ (z >> 31);
            all_zero = all_zero && word == 0;
        }
        if (all_zero) state_[0] = 1;  // xoshiro forbids the all-zero state
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1]; safe as a log/sqrt argument.
    double uniform_open() { return 1.0 - uniform01(); }

    /// Uniform integer in [0, n) via Lemire's method with rejection.
    std::uint64_t uniform_below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t x = next_u64();
            const unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
            if (static_cast<std::uint64_t>(m) >= threshold)
                return static_cast<std::uint64_t>(m >> 64);
        }
    }

    /// Standard normal via Box-Muller; the paired deviate is cached.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_open()));
        const double theta = 6.283185307179586476925286766559 * uniform01();
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

    /// Gamma(shape, scale), Marsaglia-Tsang squeeze; shape < 1 handled by
    /// the boosting identity G(a) = G(a+1) * U^{1/a}.
    double gamma(double shape, double scale) {
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0, scale);
            return g * std::pow(uniform_open(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_open();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
                return d * v * scale;
        }
    }

    /// Chi-square with (possibly fractional) df > 0.
    double chi_square(double df) { return gamma(0.5 * df, 2.0); }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t state_[4];
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace spdtest

#endif  // SPDTEST_RNG_HPP
