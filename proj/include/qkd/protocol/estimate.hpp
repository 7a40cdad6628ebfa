#pragma once

#include <cstdint>

#include "qkd/bitvec.hpp"

namespace qkd::protocol {

// Fraction of positions where the two disclosed samples disagree.
double estimate_qber(const BitVec& alice_sample, const BitVec& bob_sample);

// One-sided finite-sampling bound:
//   q_tilde = q_hat + (1/2) * sqrt((2*ln(1/eps_pe) + 2*ln(m+1)) / m),
// clamped to 1/2.
double qber_upper_bound(double q_hat, std::uint64_t m, double eps_pe);

}  // namespace qkd::protocol
