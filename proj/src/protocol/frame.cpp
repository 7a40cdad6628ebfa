#include "qkd/protocol/frame.hpp"

#include <algorithm>
#include <stdexcept>

#include "qkd/protocol/estimate.hpp"
#include "qkd/rng.hpp"

namespace qkd::protocol {

std::vector<uint32_t> sample_positions(uint64_t seed, uint32_t total, uint32_t m) {
    if (m > total) throw std::invalid_argument("sample_positions: m exceeds window");
    std::vector<uint32_t> idx(total);
    for (uint32_t i = 0; i < total; ++i) idx[i] = i;
    Rng rng(seed);
    for (uint32_t i = 0; i < m; ++i) {
        uint32_t j = i + static_cast<uint32_t>(rng.next_below(total - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    return idx;
}

SiftedFrame build_frame(uint64_t frame_id, const BitVec& window, uint64_t est_seed, uint32_t n,
                        uint32_t m) {
    if (window.size() != static_cast<std::size_t>(n) + m)
        throw std::invalid_argument("build_frame: window size != n + m");
    SiftedFrame f;
    f.frame_id = frame_id;
    f.est_positions = sample_positions(est_seed, n + m, m);
    f.est_bits = BitVec(m);
    f.key_bits = BitVec(n);

    std::size_t ei = 0, ki = 0;
    for (uint32_t i = 0; i < n + m; ++i) {
        if (ei < f.est_positions.size() && f.est_positions[ei] == i)
            f.est_bits.set(ei++, window.get(i));
        else
            f.key_bits.set(ki++, window.get(i));
    }
    return f;
}

void FrameAssembler::push(bool bit, double timestamp) {
    bits_.push_back(bit);
    stamps_.push_back(timestamp);
}

bool FrameAssembler::frame_ready() const { return bits_.size() >= window_size(); }

FrameWindow FrameAssembler::pop_window() {
    if (!frame_ready()) throw std::logic_error("FrameAssembler: window not ready");
    std::size_t w = window_size();
    FrameWindow out;
    out.bits = BitVec(w);
    for (std::size_t i = 0; i < w; ++i) out.bits.set(i, bits_[i]);
    out.first_timestamp = stamps_.front();
    out.last_timestamp = stamps_[w - 1];
    bits_.erase(bits_.begin(), bits_.begin() + w);
    stamps_.erase(stamps_.begin(), stamps_.begin() + w);
    return out;
}

}  // namespace qkd::protocol
