#pragma once

#include <cmath>
#include <cstdint>

namespace qkd {

// 64-bit finalizer from the splitmix64 generator. Strong mixing, cheap,
// and identical on every platform, which is what keeps replays bit-exact.
inline constexpr uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stateless counter RNG: value = f(seed, stream, index). Random access by
// pulse index is O(1), so gigapulse runs never materialize their history.
inline constexpr uint64_t hash3_u64(uint64_t seed, uint64_t stream, uint64_t index) {
    uint64_t z = mix64(seed ^ (stream * 0xd6e8feb86659fd93ULL));
    return mix64(z ^ (index * 0xa0761d6478bd642fULL));
}

inline constexpr double to_unit_double(uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;  // [0, 1)
}

inline double unit_at(uint64_t seed, uint64_t stream, uint64_t index) {
    return to_unit_double(hash3_u64(seed, stream, index));
}

// Sequential generator for shuffles, seeds and test data.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double next_unit() { return to_unit_double(next_u64()); }

    bool next_bool() { return next_u64() >> 63; }

    // Uniform in [0, n) without modulo bias (Lemire rejection).
    uint64_t next_below(uint64_t n) {
        for (;;) {
            uint64_t x = next_u64();
            __uint128_t m = static_cast<__uint128_t>(x) * n;
            uint64_t lo = static_cast<uint64_t>(m);
            if (lo >= n || lo >= (uint64_t(0) - n) % n) return static_cast<uint64_t>(m >> 64);
        }
    }

    // Standard normal via polar Box-Muller.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_unit() - 1.0;
            v = 2.0 * next_unit() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double k = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * k;
        have_spare_ = true;
        return u * k;
    }

    // Number of Bernoulli(p) failures before the next success; lets the
    // caller jump straight to the next event in a sparse process.
    uint64_t next_geometric_skip(double p) {
        if (p >= 1.0) return 0;
        if (p <= 0.0) return UINT64_MAX;
        double u = next_unit();
        if (u <= 0.0) u = 0x1.0p-53;
        double g = std::floor(std::log(u) / std::log1p(-p));
        if (g >= 9.2e18) return UINT64_MAX;
        return static_cast<uint64_t>(g);
    }

private:
    uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace qkd
