#pragma once

#include <cstdint>
#include <vector>

#include "qkd/ldpc/code.hpp"

namespace qkd::ldpc {

// Frame-specific split of a code's adaptation pool. Punctured columns carry
// sender-local random filler (their channel information is withheld, buying
// back one syndrome bit each); shortened columns are fixed to zero and known
// to both sides.
struct RateAdaptConfig {
    std::vector<uint32_t> punctured;  // sorted column indices
    std::vector<uint32_t> shortened;  // sorted, disjoint from punctured
    uint32_t disclosed_shortened = 0;
    double effective_rate = 0.0;

    void validate(const LdpcCode& code) const;
};

// The published rate identity, asserted on every config.
double effective_rate_formula(double code_rate, uint32_t block_len,
                              uint32_t punctured, uint32_t shortened);

// Splits the pool. Punctured columns are chosen so no parity check touches
// two of them while that is possible (spread selection keeps the decoder's
// first iterations informative); the remaining pool columns are shortened.
RateAdaptConfig make_rate_adapt(const LdpcCode& code, uint32_t n_punctured);

// Block geometry shared by both endpoints: payload_n bits of key are carried
// in a block of block_len(payload_n, delta) columns, the last pool columns
// of which form the adaptation pool.
uint32_t block_len_for(uint32_t payload_n, double delta);

struct RateChoice {
    size_t rate_index = 0;  // into the ascending rate list
    double code_rate = 0.0;
    uint32_t block_len = 0;
    uint32_t n_chk = 0;
    uint32_t punctured = 0;
    uint32_t shortened = 0;
    uint32_t leak_bits = 0;  // n_chk - punctured + disclosed shortened
};

// Chooses the least-leakage base code and pool split whose disclosed
// syndrome meets target_f times the Shannon minimum for the measured error
// rate. Throws UnsupportedRateError when even the lowest-rate code cannot
// cover q.
RateChoice select_rate(double q, uint32_t payload_n, double delta,
                       const std::vector<double>& rates, double target_f);

struct EfficiencyRun {
    bool converged = false;
    uint64_t leak_bits = 0;
    double qber = 0.0;
    uint32_t payload_n = 0;
};

struct EfficiencyReport {
    uint32_t frames = 0;
    uint32_t converged = 0;
    double f = 0.0;            // sum(leak) / sum(n*H(q)) over converged frames
    double convergence = 0.0;  // converged / frames
};

EfficiencyReport measure_efficiency(const std::vector<EfficiencyRun>& runs);

}  // namespace qkd::ldpc
