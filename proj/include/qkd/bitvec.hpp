#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace qkd {

// Dynamically sized bit string. Bit i lives in word i/64 at position i%64;
// byte serialization is LSB-first within each byte.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t nbits) { resize(nbits); }

    std::size_t size() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }

    void resize(std::size_t nbits) {
        nbits_ = nbits;
        words_.assign((nbits + 63) / 64, 0);
    }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

    void set(std::size_t i, bool v) {
        uint64_t mask = uint64_t{1} << (i & 63);
        if (v)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }

    void flip(std::size_t i) { words_[i >> 6] ^= uint64_t{1} << (i & 63); }

    void push_back(bool v) {
        if ((nbits_ & 63) == 0) words_.push_back(0);
        ++nbits_;
        set(nbits_ - 1, v);
    }

    void clear() {
        nbits_ = 0;
        words_.clear();
    }

    // XOR of equal-length vectors.
    BitVec& operator^=(const BitVec& o);

    std::size_t popcount() const;

    bool operator==(const BitVec& o) const;
    bool operator!=(const BitVec& o) const { return !(*this == o); }

    BitVec slice(std::size_t from, std::size_t len) const;
    void append(const BitVec& o);

    std::vector<uint8_t> to_bytes() const;
    static BitVec from_bytes(const std::vector<uint8_t>& bytes, std::size_t nbits);

    // "0101..." form, for fixtures and error messages.
    std::string to_string() const;
    static BitVec parse(const std::string& s);

    const std::vector<uint64_t>& words() const { return words_; }
    uint64_t word(std::size_t w) const { return w < words_.size() ? words_[w] : 0; }

private:
    std::size_t nbits_ = 0;
    std::vector<uint64_t> words_;

    void mask_tail() {
        if (nbits_ & 63) words_.back() &= (uint64_t{1} << (nbits_ & 63)) - 1;
    }
};

}  // namespace qkd
