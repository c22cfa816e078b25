#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace guesr {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256** seeded through splitmix64. Self-contained so that runs are
// bit-reproducible independent of the standard library's distributions.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }

    uint64_t next() {
        const uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // [0, 1)
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    // [0, n), unbiased
    uint64_t below(uint64_t n) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % n;
    }

    double normal(double mu = 0.0, double sigma = 1.0) {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
        return mu + sigma * z;
    }

    // Derives a child seed from (seed, path); used to hand independent
    // deterministic streams to views, negative draws, init, shuffles.
    static uint64_t derive(uint64_t seed, std::initializer_list<uint64_t> path) {
        uint64_t h = seed;
        for (uint64_t x : path) {
            h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            uint64_t s = h;
            h = splitmix64(s);
        }
        return h;
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t state_[4];
};

}  // namespace guesr
