#include "qkd/bitvec.hpp"

#include <bit>
#include <stdexcept>

namespace qkd {

BitVec& BitVec::operator^=(const BitVec& o) {
    if (o.nbits_ != nbits_) throw std::invalid_argument("BitVec xor: length mismatch");
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
    return *this;
}

std::size_t BitVec::popcount() const {
    std::size_t n = 0;
    for (uint64_t w : words_) n += std::popcount(w);
    return n;
}

bool BitVec::operator==(const BitVec& o) const {
    return nbits_ == o.nbits_ && words_ == o.words_;
}

BitVec BitVec::slice(std::size_t from, std::size_t len) const {
    if (from + len > nbits_) throw std::out_of_range("BitVec slice");
    BitVec out(len);
    for (std::size_t i = 0; i < len; ++i) out.set(i, get(from + i));
    return out;
}

void BitVec::append(const BitVec& o) {
    for (std::size_t i = 0; i < o.size(); ++i) push_back(o.get(i));
}

std::vector<uint8_t> BitVec::to_bytes() const {
    std::vector<uint8_t> out((nbits_ + 7) / 8, 0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::size_t w = i / 8, shift = (i % 8) * 8;
        if (w < words_.size()) out[i] = static_cast<uint8_t>(words_[w] >> shift);
    }
    return out;
}

BitVec BitVec::from_bytes(const std::vector<uint8_t>& bytes, std::size_t nbits) {
    if (bytes.size() * 8 < nbits) throw std::invalid_argument("BitVec::from_bytes: short buffer");
    BitVec out(nbits);
    for (std::size_t i = 0; i < bytes.size() && i * 8 < nbits; ++i)
        out.words_[i / 8] |= uint64_t{bytes[i]} << ((i % 8) * 8);
    out.mask_tail();
    return out;
}

std::string BitVec::to_string() const {
    std::string s(nbits_, '0');
    for (std::size_t i = 0; i < nbits_; ++i)
        if (get(i)) s[i] = '1';
    return s;
}

BitVec BitVec::parse(const std::string& s) {
    BitVec out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1')
            out.set(i, true);
        else if (s[i] != '0')
            throw std::invalid_argument("BitVec::parse: expected 0/1");
    }
    return out;
}

}  // namespace qkd
