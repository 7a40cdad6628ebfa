#pragma once

#include <cstdint>
#include <vector>

#include "qkd/bitvec.hpp"
#include "qkd/hashing/gf2k.hpp"

namespace qkd::hashing {

// Polynomial-evaluation hash over GF(2^k): the message is split into k-bit
// blocks m_1..m_t (LSB-first within blocks), a final block carries the bit
// length, and the digest is sum m_i * x^(t+1-i) evaluated by Horner's rule.
// For distinct messages the collision/forgery probability over a uniform
// point x is at most (t+1)/2^k, and truncation to b tag bits adds 2^-b.
u128 poly_eval(const Gf2k& field, const std::vector<uint8_t>& msg, std::size_t msg_bits,
               u128 point);

u128 poly_eval(const Gf2k& field, const BitVec& msg, u128 point);

// Error-verification tag: two-stage almost-universal hash. Stage one is
// GF(2^64) polynomial evaluation at point_x (eps1 <= (blocks+2)/2^64);
// stage two compresses the 64-bit digest to tag_bits via y -> low bits of
// point_r * y in GF(2^64), an exactly universal family (eps2 = 2^-tag_bits).
// Truncating the polynomial directly would carry the block-count factor
// into the 2^-34 term and blow the correctness budget for frame-size
// messages. Both points are public per-frame randomness; only the
// disclosed tag counts as leakage.
uint64_t verify_hash(const BitVec& data, uint64_t point_x, uint64_t point_r, int tag_bits = 34);

// Collision bound for frame-size messages at the given tag width:
//   eps <= (blocks+2)/2^64 + 2^-tag_bits.
double verify_collision_bound(std::size_t msg_bits, int tag_bits = 34);

// Wegman-Carter authentication tag: GF(2^128) evaluation at a secret
// point, truncated to tag_bits (86 by default), one-time-padded with otp.
// The otp is fresh secret key per tag; the evaluation point is reusable.
BitVec auth_tag(const std::vector<uint8_t>& msg, u128 eval_key, const BitVec& otp,
                int tag_bits = 86);

// Field-parametric variant, used by scaled-down statistical tests.
BitVec auth_tag_field(const Gf2k& field, const std::vector<uint8_t>& msg, u128 eval_key,
                      const BitVec& otp, int tag_bits);

bool auth_check(const std::vector<uint8_t>& msg, u128 eval_key, const BitVec& otp,
                const BitVec& tag, int tag_bits = 86);

double auth_forgery_bound(std::size_t msg_bits, int tag_bits = 86);

}  // namespace qkd::hashing
