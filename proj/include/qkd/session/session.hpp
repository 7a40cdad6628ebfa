#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qkd/bitvec.hpp"
#include "qkd/params.hpp"
#include "qkd/session/transport.hpp"

namespace qkd::session {

enum class Role : uint8_t { Alice = 1, Bob = 2 };

// Frame outcome. Discards are counted, never aborted on; an abort ends the
// whole session.
enum class FrameStatus : uint8_t {
    Ok = 0,
    DiscardVerify = 1,  // reconciliation converged but hashes disagreed
    DiscardDecode = 2,  // decoder failed on the last permitted attempt
    DiscardRate = 3,    // measured QBER outside the code set's range
};
const char* frame_status_name(FrameStatus s);

struct FrameLog {
    uint64_t frame_id = 0;
    double q_hat = 0.0;
    double q_tilde = 0.0;
    double rate_used = 0.0;  // base code rate of the last attempt, 0 if none
    uint64_t leak_ec = 0;    // syndrome disclosure net of puncturing, summed over attempts
    uint64_t l_key = 0;
    FrameStatus status = FrameStatus::Ok;
};

struct SessionReport {
    Role role = Role::Alice;
    uint64_t frames_total = 0;
    uint64_t frames_ok = 0;
    uint64_t secret_bits = 0;       // sum of per-frame l_key
    uint64_t pulses = 0;            // windows consumed from the source clock
    uint64_t chunks_discarded = 0;  // lost to compensation scans
    double sim_duration_s = 0.0;    // pulses / source rate
    double skr_bps = 0.0;           // secret_bits / sim_duration_s
    bool aborted = false;
    std::string abort_reason;
    std::vector<FrameLog> frames;
    BitVec key_material;            // dispensed secret key, all ok frames concatenated
    uint64_t auth_drawn_bits = 0;
    uint64_t auth_deposited_bits = 0;
};

// Runs one end of the two-party post-processing protocol to completion.
// Both peers must hold identical configs (enforced at handshake). The
// returned report never throws for frame-level failures; session-level
// failures surface as aborted = true with the reason recorded.
SessionReport run_session(Role role, Transport& t, const ExperimentConfig& cfg);

// Per-frame log round-trip (CSV, one row per frame).
void write_frame_csv(const std::string& path, const std::vector<FrameLog>& frames);
std::vector<FrameLog> read_frame_csv(const std::string& path);

std::string session_summary(const SessionReport& r);

// Counter-expansion of a short seed into a bit string; used for the
// pre-shared authentication bootstrap and for Toeplitz seed transport
// (the wire carries 64 bits, both sides expand identically).
BitVec expand_seed_bits(uint64_t seed, std::size_t nbits);

}  // namespace qkd::session
