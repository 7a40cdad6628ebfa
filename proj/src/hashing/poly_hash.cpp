#include "qkd/hashing/poly_hash.hpp"

#include <cmath>
#include <stdexcept>

namespace qkd::hashing {

namespace {

u128 block_at(const std::vector<uint8_t>& msg, std::size_t block, int k) {
    std::size_t bit0 = block * static_cast<std::size_t>(k);
    std::size_t byte0 = bit0 / 8;
    int shift = static_cast<int>(bit0 % 8);
    int nbytes = (k + shift + 7) / 8;
    u128 v = 0;
    for (int i = 0; i < nbytes; ++i) {
        std::size_t idx = byte0 + i;
        if (idx < msg.size()) v |= u128{msg[idx]} << (8 * i);
    }
    return v >> shift;
}

}  // namespace

u128 poly_eval(const Gf2k& field, const std::vector<uint8_t>& msg, std::size_t msg_bits,
               u128 point) {
    if (msg_bits > msg.size() * 8) throw std::invalid_argument("poly_eval: msg_bits too large");
    std::size_t t = (msg_bits + field.k - 1) / field.k;
    u128 acc = 0;
    for (std::size_t b = 0; b < t; ++b) {
        u128 m = block_at(msg, b, field.k) & field.mask;
        if (b + 1 == t) {
            // mask the final partial block
            std::size_t rem = msg_bits - b * field.k;
            if (rem < static_cast<std::size_t>(field.k)) m &= (u128{1} << rem) - 1;
        }
        acc = field.mul(acc, point) ^ m;
    }
    u128 len_block = static_cast<u128>(msg_bits) & field.mask;
    acc = field.mul(acc, point) ^ len_block;
    return field.mul(acc, point);
}

u128 poly_eval(const Gf2k& field, const BitVec& msg, u128 point) {
    return poly_eval(field, msg.to_bytes(), msg.size(), point);
}

uint64_t verify_hash(const BitVec& data, uint64_t point_x, uint64_t point_r, int tag_bits) {
    if (tag_bits < 1 || tag_bits > 64) throw std::invalid_argument("verify_hash: bad tag width");
    Gf2k f(64);
    u128 h = poly_eval(f, data, point_x);
    u128 compressed = f.mul(h, point_r);
    uint64_t mask = tag_bits == 64 ? ~uint64_t{0} : (uint64_t{1} << tag_bits) - 1;
    return static_cast<uint64_t>(compressed) & mask;
}

double verify_collision_bound(std::size_t msg_bits, int tag_bits) {
    double blocks = std::ceil(static_cast<double>(msg_bits) / 64.0) + 2.0;
    return blocks * std::pow(2.0, -64.0) + std::pow(2.0, -tag_bits);
}

BitVec auth_tag_field(const Gf2k& field, const std::vector<uint8_t>& msg, u128 eval_key,
                      const BitVec& otp, int tag_bits) {
    if (tag_bits < 1 || tag_bits > field.k) throw std::invalid_argument("auth_tag: bad tag width");
    if (otp.size() != static_cast<std::size_t>(tag_bits))
        throw std::invalid_argument("auth_tag: otp width must equal tag width");
    u128 h = poly_eval(field, msg, msg.size() * 8, eval_key);
    BitVec tag(tag_bits);
    for (int i = 0; i < tag_bits; ++i) tag.set(i, ((h >> i) & 1) != 0);
    tag ^= otp;
    return tag;
}

BitVec auth_tag(const std::vector<uint8_t>& msg, u128 eval_key, const BitVec& otp,
                int tag_bits) {
    return auth_tag_field(Gf2k(128), msg, eval_key, otp, tag_bits);
}

bool auth_check(const std::vector<uint8_t>& msg, u128 eval_key, const BitVec& otp,
                const BitVec& tag, int tag_bits) {
    if (tag.size() != static_cast<std::size_t>(tag_bits)) return false;
    BitVec expect = auth_tag(msg, eval_key, otp, tag_bits);
    // constant-time-style comparison
    uint64_t diff = 0;
    for (std::size_t w = 0; w < (expect.size() + 63) / 64; ++w)
        diff |= expect.word(w) ^ tag.word(w);
    return diff == 0;
}

double auth_forgery_bound(std::size_t msg_bits, int tag_bits) {
    // Truncating the 128-bit evaluation to tag_bits keeps the block-count
    // factor: eps <= (blocks+2) * 2^-tag_bits.
    double blocks = std::ceil(static_cast<double>(msg_bits) / 128.0) + 2.0;
    return blocks * std::pow(2.0, -tag_bits);
}

}  // namespace qkd::hashing
