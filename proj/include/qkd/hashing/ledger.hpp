#pragma once

#include <cstdint>
#include <deque>

#include "qkd/bitvec.hpp"

namespace qkd::hashing {

enum class KeyUse { AuthEvalKey, AuthOtp };

// Tracks the shared secret-key pool: the pre-shared bootstrap string plus
// harvested secret key. Authentication draws bits FIFO; both endpoints run
// identical ledgers so their draws stay aligned. Every consumed bit is
// attributed to a purpose so nu_auth accounting can be checked bit-exactly.
class KeyMaterialLedger {
public:
    explicit KeyMaterialLedger(const BitVec& bootstrap);

    BitVec draw(std::size_t nbits, KeyUse use);
    void deposit(const BitVec& key);

    std::size_t available() const { return pool_.size(); }
    std::uint64_t total_deposited() const { return deposited_; }
    std::uint64_t drawn_total() const { return drawn_eval_ + drawn_otp_; }
    std::uint64_t drawn_eval_key() const { return drawn_eval_; }
    std::uint64_t drawn_otp() const { return drawn_otp_; }

private:
    std::deque<bool> pool_;
    std::uint64_t deposited_ = 0;
    std::uint64_t drawn_eval_ = 0;
    std::uint64_t drawn_otp_ = 0;
};

}  // namespace qkd::hashing
