#include "qkd/protocol/sift.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qkd/rng.hpp"

namespace qkd::protocol {

namespace {
constexpr uint64_t kResolveStream = 0x51f7;
}

BobSift sift_bob_clicks(std::span<const ClickRecord> clicks,
                        const std::function<Basis(uint64_t)>& alice_basis_at,
                        uint64_t resolve_seed) {
    BobSift out;
    std::size_t i = 0;
    while (i < clicks.size()) {
        std::size_t j = i;
        while (j < clicks.size() && clicks[j].pulse_index == clicks[i].pulse_index) ++j;
        uint64_t idx = clicks[i].pulse_index;
        if (idx != kNoPulse) {
            Basis ab = alice_basis_at(idx);
            int fired[2] = {0, 0};  // per matched-basis detector bit
            double ts = clicks[i].timestamp;
            for (std::size_t k = i; k < j; ++k) {
                if (basis_of_detector(clicks[k].detector) != ab) continue;
                ++fired[bit_of_detector(clicks[k].detector)];
                ts = clicks[k].timestamp;
            }
            int total = fired[0] + fired[1];
            if (total >= 1) {
                uint8_t bit;
                if (fired[0] > 0 && fired[1] > 0) {
                    bit = static_cast<uint8_t>(hash3_u64(resolve_seed, kResolveStream, idx) & 1);
                    ++out.double_clicks;
                } else {
                    bit = fired[1] > 0 ? 1 : 0;
                }
                out.indices.push_back(idx);
                out.bits.push_back(bit);
                out.timestamps.push_back(ts);
            }
        }
        i = j;
    }
    return out;
}

std::vector<ClickRecord> assign_windows(std::span<const ClickRecord> clicks,
                                        double source_rate_hz) {
    std::vector<ClickRecord> out(clicks.begin(), clicks.end());
    for (ClickRecord& c : out)
        if (c.pulse_index == kNoPulse)
            c.pulse_index = static_cast<uint64_t>(std::llround(c.timestamp * source_rate_hz));
    return out;
}

std::vector<SiftedPair> sift(std::span<const PulseRecord> alice_pulses,
                             std::span<const ClickRecord> bob_clicks, uint64_t resolve_seed) {
    auto find_pulse = [&](uint64_t idx) -> const PulseRecord* {
        auto it = std::lower_bound(alice_pulses.begin(), alice_pulses.end(), idx,
                                   [](const PulseRecord& r, uint64_t v) { return r.pulse_index < v; });
        if (it == alice_pulses.end() || it->pulse_index != idx) return nullptr;
        return &*it;
    };

    BobSift bob = sift_bob_clicks(
        bob_clicks,
        [&](uint64_t idx) {
            const PulseRecord* p = find_pulse(idx);
            if (!p) throw std::invalid_argument("sift: click references unknown pulse");
            return p->basis;
        },
        resolve_seed);

    std::vector<SiftedPair> out;
    out.reserve(bob.indices.size());
    for (std::size_t k = 0; k < bob.indices.size(); ++k) {
        const PulseRecord* p = find_pulse(bob.indices[k]);
        SiftedPair sp;
        sp.pulse_index = bob.indices[k];
        sp.basis = p->basis;
        sp.alice_bit = p->bit;
        sp.bob_bit = bob.bits[k];
        sp.timestamp = bob.timestamps[k];
        out.push_back(sp);
    }
    return out;
}

}  // namespace qkd::protocol
