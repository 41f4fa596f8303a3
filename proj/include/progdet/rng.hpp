#pragma once

#include <cstdint>

namespace progdet {

// Deterministic 64-bit generator (splitmix64). We roll our own instead of
// using <random> distributions because those are not bit-portable across
// standard libraries, and the pipelines here pin byte-identical outputs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // uniform integer in [lo, hi], inclusive
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1u;
        return lo + static_cast<std::int64_t>(next_u64() % range);
    }

    // Box-Muller without a cached spare: the stream position stays a pure
    // function of the call count, which keeps draw order easy to reason about.
    double normal(double mean, double sigma);

private:
    std::uint64_t state_;
};

// Per-cell seed for grid/video index `index` under a master seed. Index 0
// keeps the master seed itself so a singleton sweep reproduces the base
// configuration bit-for-bit.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace progdet
