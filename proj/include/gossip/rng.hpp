#pragma once

#include <cstdint>
#include <random>

namespace gossip {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Deterministic random stream. All bounded draws avoid
// std::uniform_int_distribution, whose algorithm is implementation-defined;
// traces must be identical across compilers for the same seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(scramble(seed)) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform value in [0, bound). bound == 1 consumes no entropy.
    std::uint32_t below(std::uint32_t bound) {
        if (bound <= 1) return 0;
        const std::uint32_t shift = 64 - top_bit(bound);
        for (;;) {
            const auto v = static_cast<std::uint32_t>(gen_() >> shift);
            if (v < bound) return v;
        }
    }

    // Uniform value with the given number of low bits, nbits in [1, 32].
    std::uint32_t bits(unsigned nbits) {
        return static_cast<std::uint32_t>(gen_() >> (64 - nbits));
    }

    std::uint8_t byte() { return static_cast<std::uint8_t>(gen_() >> 56); }

    // Decorrelated child seed for per-node streams.
    static std::uint64_t child_seed(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t s = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
        return splitmix64(s);
    }

private:
    static std::uint64_t scramble(std::uint64_t seed) {
        std::uint64_t s = seed;
        return splitmix64(s);
    }

    // Smallest b with 2^b >= v, for v >= 2.
    static unsigned top_bit(std::uint32_t v) {
        unsigned b = 1;
        while ((1ULL << b) < v) ++b;
        return b;
    }

    std::mt19937_64 gen_;
};

}  // namespace gossip
