#include "qkd/hashing/ledger.hpp"

#include <stdexcept>

namespace qkd::hashing {

KeyMaterialLedger::KeyMaterialLedger(const BitVec& bootstrap) {
    for (std::size_t i = 0; i < bootstrap.size(); ++i) pool_.push_back(bootstrap.get(i));
}

BitVec KeyMaterialLedger::draw(std::size_t nbits, KeyUse use) {
    if (pool_.size() < nbits)
        throw std::runtime_error("key ledger: secret key material exhausted");
    BitVec out(nbits);
    for (std::size_t i = 0; i < nbits; ++i) {
        out.set(i, pool_.front());
        pool_.pop_front();
    }
    if (use == KeyUse::AuthEvalKey)
        drawn_eval_ += nbits;
    else
        drawn_otp_ += nbits;
    return out;
}

void KeyMaterialLedger::deposit(const BitVec& key) {
    for (std::size_t i = 0; i < key.size(); ++i) pool_.push_back(key.get(i));
    deposited_ += key.size();
}

}  // namespace qkd::hashing
