#include "qkd/hashing/toeplitz.hpp"

#include <bit>
#include <stdexcept>

namespace qkd::hashing {

namespace {

// 64 seed bits starting at bit offset `off` (zero-padded past the end).
inline uint64_t window64(const BitVec& v, std::size_t off) {
    std::size_t q = off >> 6, r = off & 63;
    uint64_t w = v.word(q);
    if (r == 0) return w;
    return (w >> r) | (v.word(q + 1) << (64 - r));
}

}  // namespace

BitVec toeplitz_hash(const BitVec& input, const BitVec& seed, std::size_t l) {
    if (l == 0) return BitVec();
    std::size_t n = input.size();
    if (n == 0) throw std::invalid_argument("toeplitz_hash: empty input");
    if (seed.size() != n + l - 1)
        throw std::invalid_argument("toeplitz_hash: seed must hold n + l - 1 bits");

    std::size_t nwords = (n + 63) / 64;
    BitVec out(l);
    for (std::size_t i = 0; i < l; ++i) {
        std::size_t off = l - 1 - i;
        uint64_t acc = 0;
        for (std::size_t w = 0; w < nwords; ++w)
            acc ^= input.word(w) & window64(seed, off + (w << 6));
        out.set(i, std::popcount(acc) & 1);
    }
    return out;
}

}  // namespace qkd::hashing
