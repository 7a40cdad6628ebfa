#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "qkd/bitvec.hpp"

namespace qkd::protocol {

// One post-processing block: n key bits plus m disclosed estimation bits,
// all drawn from the same sifted window.
struct SiftedFrame {
    uint64_t frame_id = 0;
    BitVec key_bits;                      // length n
    std::vector<uint32_t> est_positions;  // m positions within the n+m window
    BitVec est_bits;                      // this side's estimation bits
    double q_hat = 0.0;
    double q_tilde = 0.0;
    bool discard = false;
};

// m estimation positions drawn uniformly without replacement from
// [0, total), deterministic under the seed. Returned sorted.
std::vector<uint32_t> sample_positions(uint64_t seed, uint32_t total, uint32_t m);

// Splits an (n+m)-bit sifted window into key and estimation parts.
// Estimation and key positions are disjoint by construction.
SiftedFrame build_frame(uint64_t frame_id, const BitVec& window, uint64_t est_seed, uint32_t n,
                        uint32_t m);

struct FrameWindow {
    BitVec bits;
    double first_timestamp = 0.0;
    double last_timestamp = 0.0;
};

// Buffers the sifted stream until a full n+m window is available,
// mirroring how sifted bits accumulate between frames.
class FrameAssembler {
public:
    FrameAssembler(uint32_t n, uint32_t m) : n_(n), m_(m) {}

    void push(bool bit, double timestamp);
    bool frame_ready() const;
    FrameWindow pop_window();

    std::size_t buffered() const { return bits_.size(); }
    std::size_t window_size() const { return static_cast<std::size_t>(n_) + m_; }
    uint32_t n() const { return n_; }
    uint32_t m() const { return m_; }

private:
    uint32_t n_, m_;
    std::deque<bool> bits_;
    std::deque<double> stamps_;
};

}  // namespace qkd::protocol
