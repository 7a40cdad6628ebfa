#pragma once

#include "qkd/bitvec.hpp"

namespace qkd::hashing {

// Multiplies the input by the l x n binary Toeplitz matrix
//   T[i][j] = seed[l - 1 - i + j],
// whose first column (top to bottom) is seed bits [0, l) read downward
// from index l-1 and whose first row is seed bits [l-1, n+l-1).
// seed must hold exactly n + l - 1 bits. Output has l bits. l = 0 yields
// an empty vector. The word-sliding implementation is bit-identical to
// the naive matrix product.
BitVec toeplitz_hash(const BitVec& input, const BitVec& seed, std::size_t l);

}  // namespace qkd::hashing
