#pragma once

#include <cstdint>

namespace mspk {

// SplitMix64. Chosen over <random> engines because its output (and our
// int/double mappings below) is identical on every platform, which keeps
// generated fixtures byte-stable.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [0, n). Modulo mapping; bias is negligible for the small n
    // used here and keeps the mapping platform-stable.
    uint64_t next_below(uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    // Uniform integer in [lo, hi], inclusive.
    int64_t next_in(int64_t lo, int64_t hi) {
        if (hi <= lo) return lo;
        return lo + static_cast<int64_t>(next_below(static_cast<uint64_t>(hi - lo + 1)));
    }

    // Uniform real in [lo, hi).
    double next_real(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Derive an independent stream, e.g. one per page.
    Rng fork(uint64_t salt) {
        Rng r(state_ ^ (0xD1B54A32D192ED03ull * (salt + 1)));
        r.next_u64();
        return r;
    }

private:
    uint64_t state_;
};

} // namespace mspk
