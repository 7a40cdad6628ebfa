#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qkd/security/security.hpp"

namespace qkd {

// Physical-layer parameters. Efficiencies are linear (not dB) unless the
// name says otherwise. eta_source_cband and eta_channel are derived when
// absent from the config and cross-checked when present.
struct SystemParams {
    double source_rate_hz = 72.6e6;
    double eta_qd = 0.165;
    double eta_transport = 0.71;
    double eta_fc = 0.50;
    double eta_source_cband = 0.165 * 0.71 * 0.50;
    double g2 = 0.0047;
    double eta_encoder = 0.55;
    double channel_loss_db = 9.6;
    double eta_channel = 0.0;  // derived in validate() when 0
    double eta_receiver = 0.114;
    double detector_efficiency = 0.83;
    double dark_count_hz = 50.0;
    double dead_time_s = 33e-9;
    double temporal_window_s = 1e-9;
    uint32_t burst_len = 605;

    double basis_ratio = 0.5;          // P(alice picks X)
    double misalignment_qber = 0.03225;
    double jitter_sigma_s = 50e-12;

    // Polarization drift random walk and compensation loop. A step std-dev
    // of zero disables drift entirely.
    double drift_step_rad = 0.0;       // per drift interval, per axis
    double drift_interval_s = 1e-3;
    double compensation_interval_s = 2.0;
    double compensation_threshold_qber = 0.05;
    double scan_step_rad = 0.02;
    double scan_dwell_s = 0.02;

    void validate_and_derive();

    // Per-pulse emission probability at the channel input.
    double eta_emit() const { return eta_source_cband * eta_encoder; }
    // Survival probability from channel input to a click.
    double eta_path() const { return eta_channel * eta_receiver; }
    // Expected click probability per pulse window (signal + dark).
    double p_click_signal() const { return eta_emit() * eta_path(); }
    double p_dark_per_window() const { return dark_count_hz * temporal_window_s; }
};

// Post-processing parameters shared by both endpoints.
struct PostParams {
    uint32_t frame_n = 200000;
    double sample_fraction = 0.1;  // m = floor(sample_fraction * n)
    security::SecurityBudget budget;

    std::vector<double> code_rates = {0.65, 0.70, 0.75, 0.80, 0.85, 0.90};
    double adapt_delta = 0.05;
    double target_efficiency = 1.17;
    uint32_t bp_max_iters = 60;
    uint32_t max_var_degree = 15;
    std::string degree_dir;   // empty: built-in default family
    std::string codeset_dir;  // empty: construct in memory

    int verify_tag_bits = 34;
    int auth_tag_bits = 86;
    uint32_t bootstrap_bits = 4096;

    uint64_t chunk_pulses = 1u << 24;
    uint32_t max_frames = 0;   // 0 = run to duration
    double duration_s = 10.0;  // simulated time budget

    uint32_t m() const { return static_cast<uint32_t>(sample_fraction * frame_n); }
    void validate() const;
};

struct ExperimentConfig {
    SystemParams sim;
    PostParams post;
    uint64_t seed = 1;
    std::string out_dir = ".";

    void validate();
    // Stable hash over every effective parameter; both endpoints must agree
    // before a session starts.
    uint64_t config_hash() const;
};

// Flat key=value file with '#' comments. Unknown keys are rejected;
// referenced paths must exist.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::map<std::string, std::string>& kv);
std::string dump_config(const ExperimentConfig& cfg);  // canonical form

// Purpose constants for deriving independent seed streams from the master.
namespace seed_purpose {
constexpr uint64_t kAliceBits = 0xA11CEB175;
constexpr uint64_t kAliceBasis = 0xA11CEBA515;
constexpr uint64_t kChannel = 0xC4A77E1;
constexpr uint64_t kResolve = 0xB0BD0B;
constexpr uint64_t kFrameEst = 0xF4A3E57;
constexpr uint64_t kToeplitz = 0x70E717;
constexpr uint64_t kVerify = 0x7E81F1;
constexpr uint64_t kPunctured = 0xF111E4;
constexpr uint64_t kBootstrap = 0xB0075;
constexpr uint64_t kLdpc = 0x1D9C;
}  // namespace seed_purpose

uint64_t derive_seed(uint64_t master, uint64_t purpose);

}  // namespace qkd
