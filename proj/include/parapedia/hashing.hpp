#pragma once

#include <cstdint>
#include <string_view>

// Stable hashing and seed-splitting used wherever determinism must hold
// across platforms and runs. std::hash is implementation-defined, so all
// mock derivations and sampling go through these instead.
namespace parapedia {

constexpr uint64_t fnv1a64(std::string_view s, uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

constexpr uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Deterministic stream of 64-bit values from a seed.
class SplitMixRng {
public:
    explicit SplitMixRng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ull;
        uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return (next() >> 11) * 0x1.0p-53; }

    // Uniform in [0, bound) without implementation-defined distributions.
    uint64_t next_below(uint64_t bound) { return bound ? next() % bound : 0; }

private:
    uint64_t state_;
};

inline uint64_t derive_seed(uint64_t base, std::string_view tag) {
    return splitmix64(base ^ fnv1a64(tag));
}

}  // namespace parapedia
