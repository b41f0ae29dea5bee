#pragma once

// Counter-based randomness: every draw is a pure function of
// (seed, stream key, counter), so runs replay exactly across platforms
// and independent streams can be handed to threads.

#include <cstdint>
#include <initializer_list>

namespace persuade {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Fold a sequence of keys into one 64-bit stream identifier.
inline std::uint64_t stream_key(std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (auto k : keys) h = splitmix64(h ^ splitmix64(k));
    return h;
}

/// 53-bit mantissa uniform in [0,1).
inline constexpr double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(stream_key({seed, stream})) {}

    std::uint64_t next_u64() { return splitmix64(key_ ^ splitmix64(counter_++)); }
    double uniform() { return to_unit(next_u64()); }
    bool bernoulli(double p) { return uniform() < p; }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n; }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace persuade
