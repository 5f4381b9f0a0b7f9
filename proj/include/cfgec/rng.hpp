#ifndef CFGEC_RNG_HPP
#define CFGEC_RNG_HPP

#include <bit>
#include <cstdint>
#include <cstddef>
#include <numbers>
#include <cmath>

#include "cfgec/vec.hpp"

namespace cfgec {

// splitmix64 finalizer; also used as the hash mixer for counter-based noise.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    return mix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

inline std::uint64_t double_bits(double x) { return std::bit_cast<std::uint64_t>(x); }

/// Deterministic per-trajectory random stream. Identical (seed, stream_id)
/// reproduces the identical sequence; distinct stream_ids decorrelate via
/// splitmix64 state separation.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : state_(mix64(hash_combine(mix64(seed), stream_id))) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    // uniform in (0, 1); never exactly 0, safe for log()
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = uniform(), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double th = 2.0 * std::numbers::pi * u2;
        cached_ = r * std::sin(th);
        has_cached_ = true;
        return r * std::cos(th);
    }

    Vec normal_vec(std::size_t d) {
        Vec v(d);
        for (auto& x : v) x = normal();
        return v;
    }

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// Stateless standard-normal draw keyed on an arbitrary hash key and counter.
inline double counter_normal(std::uint64_t key, std::uint64_t counter) {
    std::uint64_t a = mix64(hash_combine(key, 2 * counter));
    std::uint64_t b = mix64(hash_combine(key, 2 * counter + 1));
    double u1 = (static_cast<double>(a >> 11) + 0.5) * 0x1.0p-53;
    double u2 = (static_cast<double>(b >> 11) + 0.5) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace cfgec

#endif
