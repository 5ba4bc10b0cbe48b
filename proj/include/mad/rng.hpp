#pragma once
// Splittable counter-based RNG. Every stochastic operation derives its own
// stream from the run seed plus a label, so results are bit-reproducible
// across platforms and independent of evaluation order. Core generator is
// splitmix64; normals come from Box-Muller on top of it.

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace mad {

namespace detail {

inline uint64_t splitmix64_next(uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

} // namespace detail

class StreamRng {
public:
    explicit StreamRng(uint64_t seed) : base_(seed), state_(seed) {
        // one warm-up mix so seed=0 and seed=1 streams decorrelate immediately
        (void)detail::splitmix64_next(state_);
        base_ = state_;
    }

    // Child streams are derived from the stream identity, never from the
    // current position, so derivation order does not matter.
    StreamRng stream(std::string_view label) const {
        return StreamRng(base_ ^ (detail::fnv1a64(label) * 0x9E3779B97F4A7C15ULL));
    }
    StreamRng stream(uint64_t index) const {
        return StreamRng(base_ ^ ((index + 1) * 0xD1342543DE82EF95ULL));
    }

    uint64_t next_u64() { return detail::splitmix64_next(state_); }

    // uniform in [0, 1) with 53 random bits
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // unbiased integer in [0, n)
    uint64_t below(uint64_t n) {
        if (n <= 1) return 0;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    // standard normal, Box-Muller pair with one cached value
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t base_;
    uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace mad
