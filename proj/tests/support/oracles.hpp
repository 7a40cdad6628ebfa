#pragma once

#include <cstdint>
#include <vector>

#include "qkd/bitvec.hpp"
#include "qkd/hashing/gf2k.hpp"
#include "qkd/ldpc/code.hpp"
#include "qkd/rng.hpp"

// Reference implementations written for clarity, not speed. Each one takes
// a structurally different path from the library code it checks: the
// Toeplitz oracle materializes the matrix, the field oracle works on limb
// vectors with explicit long division, the syndrome oracle scatters from
// the variable side, the girth oracle searches cycles by BFS.
namespace testsup {

qkd::BitVec random_bits(qkd::Rng& rng, std::size_t n);

// Explicit l x n matrix product with T[i][j] = seed[l - 1 - i + j].
qkd::BitVec naive_toeplitz(const qkd::BitVec& input, const qkd::BitVec& seed,
                           std::size_t l);

// Carryless schoolbook multiply into 2k bits, then long division by
// x^k + poly_low.
qkd::hashing::u128 naive_gf2_mul(int k, qkd::hashing::u128 poly_low,
                                 qkd::hashing::u128 a, qkd::hashing::u128 b);

// Rabin irreducibility test for f = x^k + poly_low over GF(2).
bool poly_is_irreducible(int k, qkd::hashing::u128 poly_low);

// Horner-free polynomial hash: sum of m_i * x^(t+1-i) with explicit powers.
qkd::hashing::u128 naive_poly_eval(const qkd::hashing::Gf2k& field,
                                   const std::vector<uint8_t>& msg,
                                   std::size_t msg_bits, qkd::hashing::u128 point);

// Shortest cycle in the Tanner graph, exhaustive BFS from every variable.
// Returns 0 when the graph is a forest. Small codes only.
int cycle_girth(const qkd::ldpc::LdpcCode& code);

// H*x via the variable-side adjacency.
qkd::BitVec naive_syndrome(const qkd::ldpc::LdpcCode& code, const qkd::BitVec& x);

}  // namespace testsup
