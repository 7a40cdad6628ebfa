#pragma once

#include <cstdint>

namespace qkd::hashing {

using u128 = unsigned __int128;

// Binary extension field GF(2^k), k <= 128. Elements are the low k bits of
// a u128; arithmetic is carryless with reduction by a fixed low-weight
// irreducible polynomial (x^k + reduction(k)).
struct Gf2k {
    int k;
    u128 poly_low;  // field polynomial minus the x^k term
    u128 mask;      // low k bits

    explicit Gf2k(int k_);
    Gf2k(int k_, u128 poly_low_);

    u128 add(u128 a, u128 b) const { return a ^ b; }

    u128 mul(u128 a, u128 b) const {
        a &= mask;
        b &= mask;
        u128 hi = u128{1} << (k - 1);
        u128 res = 0;
        while (b) {
            if (b & 1) res ^= a;
            b >>= 1;
            bool carry = (a & hi) != 0;
            a = (a << 1) & mask;
            if (carry) a ^= poly_low;
        }
        return res;
    }

    u128 pow(u128 a, u128 e) const {
        u128 r = 1;
        a &= mask;
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }

    // Standard low-weight irreducible for supported k (8, 10, 16, 32, 64, 128).
    static u128 default_poly(int k);
};

}  // namespace qkd::hashing
