#pragma once

// Counter-based random stream. Every draw is a pure function of
// (seed, stream label, draw counter), so sweep points can be evaluated in
// any order, or in parallel, and still produce byte-identical output.
// Distribution code is written out (rather than using <random> adaptors)
// because libstdc++ leaves distribution algorithms implementation-defined.

#include <cstdint>
#include <cmath>
#include <string>

namespace clusterlab {

namespace detail {
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}
}  // namespace detail

class CounterRng {
public:
    CounterRng(uint64_t seed, const std::string& stream, uint64_t draw_index = 0)
        : key_(detail::splitmix64(seed ^ detail::splitmix64(detail::fnv1a(stream) + draw_index))) {}

    uint64_t next_u64() { return detail::splitmix64(key_ + ++counter_); }

    /// Uniform in [0, 1).
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Integer in [0, n).
    uint64_t below(uint64_t n) { return next_u64() % n; }

    /// Standard normal via Box-Muller (cached second value).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    uint64_t key_;
    uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace clusterlab
