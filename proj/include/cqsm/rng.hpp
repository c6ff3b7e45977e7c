// Deterministic random streams for reproducible simulation.
//
// Every trial of the Monte Carlo harness owns an independent stream derived
// by counter from (master_seed, point_index, trial_index), so trials can be
// evaluated in any order, on any number of workers, with identical results.
// Gaussian variates use an explicit Box-Muller transform on top of
// xoshiro256++ rather than std::normal_distribution, which keeps the byte
// stream independent of the standard library implementation.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace cqsm {

constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Collapse an arbitrary tuple of 64-bit values into one well-mixed seed.
constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = a;
    std::uint64_t h = splitmix64(s);
    s ^= b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= splitmix64(s);
    s ^= c + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= splitmix64(s);
    return h;
}

/// xoshiro256++ (Blackman/Vigna, public domain reference implementation).
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next() {
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

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

/// One self-contained random stream. Draw order is part of the contract:
/// callers document the sequence of calls they make per use.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_.next(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_.next() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1]; safe as a log() argument.
    double uniform_pos() { return static_cast<double>((gen_.next() >> 11) + 1) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; consumes two uniforms per pair and
    /// caches the second variate.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * M_PI * u2;
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

    /// Circularly symmetric complex Gaussian with E|z|^2 = variance.
    /// Consumes exactly two uniforms.
    std::complex<double> complex_gaussian(double variance) {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-variance * std::log(u1));
        const double phi = 2.0 * M_PI * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

    /// Low `count` bits of message randomness, MSB-first, one u64 per 64 bits.
    template <typename OutIt>
    void bits(int count, OutIt out) {
        std::uint64_t word = 0;
        for (int i = 0; i < count; ++i) {
            if (i % 64 == 0) word = gen_.next();
            *out++ = static_cast<std::uint8_t>((word >> (63 - (i % 64))) & 1u);
        }
    }

private:
    Xoshiro256pp gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// The per-trial stream of the Monte Carlo harness.
inline RandomStream trial_stream(std::uint64_t master_seed, std::uint64_t point_index,
                                 std::uint64_t trial_index) {
    return RandomStream(mix_seed(master_seed, point_index, trial_index));
}

}  // namespace cqsm
