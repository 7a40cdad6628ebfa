#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qkd/params.hpp"
#include "qkd/records.hpp"
#include "qkd/rng.hpp"
#include "qkd/sim/drift.hpp"

namespace qkd::sim {

// Per-pulse encoder draws. Basis and bit use separate streams of the same
// seed so the basis sequence can be disclosed without touching the bits.
struct EncodedState {
    Basis basis;
    int bit;
};
EncodedState encoded_state_at(uint64_t seed, double basis_ratio, uint64_t index);
std::vector<EncodedState> encode_burst(uint64_t rng_seed, uint32_t burst_len,
                                       double basis_ratio);

// Source + encoder: emits records for pulses carrying at least one photon.
// P(photon_count >= 1) = eta_emit, P(photon_count = 2) = g2*eta_emit^2/2.
// The draws are indexed by absolute pulse number, so a range call returns
// exactly the matching slice of a longer run.
std::vector<PulseRecord> emit_pulses(const SystemParams& p, uint64_t n_pulses,
                                     uint64_t rng_seed);
std::vector<PulseRecord> emit_pulses_range(const SystemParams& p, uint64_t first_pulse,
                                           uint64_t count, uint64_t rng_seed);

// Channel + receiver over an explicit pulse list. Dark counts are drawn per
// window and detector as a threshold test so the temporal-filter and
// dead-time monotonicity properties hold for a fixed seed. first_pulse /
// n_pulses delimit the window range darks can fall into (the records list
// only the non-empty pulses).
struct TransmitStats {
    uint64_t pulses = 0;
    uint64_t signal_clicks = 0;
    uint64_t dark_clicks = 0;
    uint64_t dead_suppressed = 0;
    uint64_t window_rejected = 0;
    uint64_t double_clicks = 0;  // two-photon pulses yielding two clicks
};
std::vector<ClickRecord> transmit_and_detect(std::span<const PulseRecord> pulses,
                                             uint64_t first_pulse,
                                             uint64_t n_pulses,
                                             const SystemParams& p,
                                             DriftModel* drift,
                                             uint64_t rng_seed,
                                             TransmitStats* stats = nullptr);

// Analytic per-second click rate for the configured chain (no dead-time
// correction; it is negligible at these occupancies).
double expected_click_rate(const SystemParams& p);

// Streaming generator for long runs. Skips empty windows geometrically and
// touches only windows that produce a click candidate, so cost scales with
// clicks rather than pulses. Ranges must be consumed in order; detector
// dead-time state and the drift model persist across calls.
class Simulator {
  public:
    Simulator(const ExperimentConfig& cfg);

    // Alice's encoder stream. The basis half is derivable from
    // chunk_basis_seed() alone; the bit half never leaves this object.
    Basis alice_basis_at(uint64_t pulse) const;
    int alice_bit_at(uint64_t pulse) const;
    uint64_t chunk_basis_seed(uint64_t chunk) const;
    uint64_t chunk_pulses() const { return chunk_; }

    // Clicks for windows [next_pulse, next_pulse + count).
    std::vector<ClickRecord> run_range(uint64_t count);
    uint64_t next_pulse() const { return next_pulse_; }

    const TransmitStats& stats() const { return stats_; }
    const DriftModel& drift() const { return drift_; }

    // Basis derivation shared with the remote peer.
    static Basis basis_from_seed(uint64_t chunk_seed, double basis_ratio,
                                 uint64_t offset_in_chunk);

  private:
    struct SkipStream {
        Rng rng{0};
        double prob = 0.0;
        uint64_t next = 0;  // next event window, UINT64_MAX when exhausted
        void advance();
    };

    SystemParams p_;
    uint64_t chunk_;
    uint64_t basis_seed_;
    uint64_t bit_seed_;
    uint64_t channel_seed_;
    double basis_ratio_;

    double accept_prob_;  // P(|jitter| <= window/2)
    double p_two_em_;     // P(photon_count = 2)
    double q_signal_;     // P(>= 1 signal click) per window
    double p_dark_;       // per window, per detector

    SkipStream signal_;
    SkipStream dark_[4];
    DriftModel drift_;
    double last_click_t_[4];
    uint64_t next_pulse_ = 0;
    TransmitStats stats_;

    void emit_click(std::vector<ClickRecord>& out, uint64_t window, int detector,
                    bool is_dark, double t);
};

}  // namespace qkd::sim
