#pragma once

#include <cstdint>

#include "qkd/bitvec.hpp"
#include "qkd/ldpc/code.hpp"
#include "qkd/ldpc/rate_adapt.hpp"

namespace qkd::ldpc {

struct DecodeResult {
    BitVec bits;  // full block, meaningful only when converged
    bool converged = false;
    uint32_t iters = 0;
};

// Flooding-schedule sum-product decoding toward a target syndrome.
// noisy_bits holds the receiver's block: payload bits as observed,
// punctured columns arbitrary (their channel LLR is zero), shortened
// columns zero (pinned by a saturated LLR). Converged means the hard
// decision reproduces target_syndrome exactly.
DecodeResult decode(const LdpcCode& code, const RateAdaptConfig& rc,
                    const BitVec& noisy_bits, const BitVec& target_syndrome,
                    double channel_qber, uint32_t max_iters);

}  // namespace qkd::ldpc
