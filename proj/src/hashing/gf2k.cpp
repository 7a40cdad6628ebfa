#include "qkd/hashing/gf2k.hpp"

#include <stdexcept>

namespace qkd::hashing {

u128 Gf2k::default_poly(int k) {
    switch (k) {
        case 8: return 0x1B;     // x^8 + x^4 + x^3 + x + 1
        case 10: return 0x09;    // x^10 + x^3 + 1
        case 16: return 0x2B;    // x^16 + x^5 + x^3 + x + 1
        case 32: return 0x8D;    // x^32 + x^7 + x^3 + x^2 + 1
        case 64: return 0x1B;    // x^64 + x^4 + x^3 + x + 1
        case 128: return 0x87;   // x^128 + x^7 + x^2 + x + 1
        default: throw std::invalid_argument("Gf2k: no default polynomial for this k");
    }
}

Gf2k::Gf2k(int k_) : Gf2k(k_, default_poly(k_)) {}

Gf2k::Gf2k(int k_, u128 poly_low_) : k(k_), poly_low(poly_low_) {
    if (k < 2 || k > 128) throw std::invalid_argument("Gf2k: k outside [2,128]");
    mask = k == 128 ? ~u128{0} : (u128{1} << k) - 1;
    if (poly_low & ~mask) throw std::invalid_argument("Gf2k: reduction polynomial too wide");
}

}  // namespace qkd::hashing
