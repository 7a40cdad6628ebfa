#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qkd/bitvec.hpp"
#include "qkd/records.hpp"

namespace qkd::protocol {

struct SiftedPair {
    uint64_t pulse_index = 0;
    Basis basis = Basis::Z;
    uint8_t alice_bit = 0;
    uint8_t bob_bit = 0;
    double timestamp = 0.0;
};

// Receiver-side sifting outcome: matched pulse indices with Bob's bits.
struct BobSift {
    std::vector<uint64_t> indices;
    std::vector<uint8_t> bits;
    std::vector<double> timestamps;
    uint64_t double_clicks = 0;  // matched-basis double clicks (kept, random bit)
};

// Keeps clicks whose measured basis equals Alice's announced basis and
// where exactly one detector of that basis fired; a matched-basis double
// click is kept with a uniformly random bit (seeded). Clicks must be
// time-ordered. alice_basis_at maps pulse index -> announced basis.
BobSift sift_bob_clicks(std::span<const ClickRecord> clicks,
                        const std::function<Basis(uint64_t)>& alice_basis_at,
                        uint64_t resolve_seed);

// Dark clicks carry no owning pulse; the receiver recovers the window from
// the detection time. Returns a copy with every pulse_index filled in.
// Valid whenever timestamp offsets stay below half the pulse period.
std::vector<ClickRecord> assign_windows(std::span<const ClickRecord> clicks,
                                        double source_rate_hz);

// Aligns Alice's pulse records with Bob's clicks and returns basis-matched
// bit pairs. Pulse records must be sorted by pulse_index.
std::vector<SiftedPair> sift(std::span<const PulseRecord> alice_pulses,
                             std::span<const ClickRecord> bob_clicks, uint64_t resolve_seed);

}  // namespace qkd::protocol
