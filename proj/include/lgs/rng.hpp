#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace lgs {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Deterministic random stream. A master seed expands to substreams by
// absorbing a path of 64-bit tags through splitmix64; the same
// (seed, path) always yields the same stream regardless of how many
// other streams were derived in between.
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(mix_(seed)) {}

    static uint64_t derive_seed(uint64_t seed, std::initializer_list<uint64_t> path) {
        uint64_t s = seed;
        (void)splitmix64(s);
        for (uint64_t tag : path) {
            s ^= tag + 0x9e3779b97f4a7c15ull + (s << 6) + (s >> 2);
            (void)splitmix64(s);
        }
        return s;
    }

    static Rng derive(uint64_t seed, std::initializer_list<uint64_t> path) {
        return Rng(derive_seed(seed, path));
    }

    uint64_t bits() { return eng_(); }

    // Uniform on [0, 1); 53-bit resolution, identical across platforms.
    double uniform01() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller (not std::normal_distribution, whose
    // output is implementation-defined).
    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Index drawn with probability weights[i] / sum(weights).
    int pick(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = uniform01() * total;
        double acc = 0.0;
        for (size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

  private:
    static uint64_t mix_(uint64_t seed) {
        uint64_t s = seed;
        return splitmix64(s);
    }

    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace lgs
