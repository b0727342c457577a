#pragma once

#include <cstdint>
#include <initializer_list>

namespace biasaudit {

// Counter-based deterministic randomness (splitmix64 finalizer). Every draw
// is a pure function of (seed, counters...), so parallel producers see the
// same stream regardless of schedule.

inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t counter_hash(uint64_t seed, std::initializer_list<uint64_t> counters) {
    uint64_t h = mix64(seed ^ 0x5851f42d4c957f2dull);
    for (uint64_t c : counters) h = mix64(h ^ mix64(c + 0x2545f4914f6cdd1dull));
    return h;
}

// Uniform in [0, 1).
inline double unit_real(uint64_t bits) {
    return double(bits >> 11) * (1.0 / 9007199254740992.0);
}

// Uniform integer in [0, n), n > 0. Fixed-point multiply keeps it portable.
inline uint64_t bounded(uint64_t bits, uint64_t n) {
    return uint64_t((static_cast<unsigned __int128>(bits) * n) >> 64);
}

} // namespace biasaudit
