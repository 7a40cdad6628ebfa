#include "qkd/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qkd/errors.hpp"

namespace qkd::sim {

namespace {

// Stream tags inside a seed's counter space.
constexpr uint64_t kBasisStream = 0x0B51;
constexpr uint64_t kBitStream = 0x0B17;
constexpr uint64_t kEmitStream = 0xE317;
constexpr uint64_t kSurviveStream = 0x5EEB;
constexpr uint64_t kJitterStream = 0x717A;
constexpr uint64_t kBobBasisStream = 0xB0BB;
constexpr uint64_t kFlipStream = 0xF11B;
constexpr uint64_t kCompStream = 0x51C0;
constexpr uint64_t kDarkHitStream = 0xDA40;   // +detector
constexpr uint64_t kDarkOffStream = 0xDA80;   // +detector
constexpr uint64_t kSigSkipSeed = 0x5159;
constexpr uint64_t kDarkSkipSeed = 0xD459;    // +detector

double gauss_at(uint64_t seed, uint64_t stream, uint64_t idx) {
    double u1 = to_unit_double(hash3_u64(seed, stream, 2 * idx));
    double u2 = to_unit_double(hash3_u64(seed, stream, 2 * idx + 1));
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

double jitter_accept_prob(double sigma, double window) {
    if (sigma <= 0.0) return 1.0;
    return std::erf(window / (2.0 * sigma * std::sqrt(2.0)));
}

// Flip probabilities add per the receiver model; clamp keeps extreme drift
// angles meaningful.
double combined_flip(double mis, double drift_extra) {
    return std::min(1.0, mis + drift_extra);
}

}  // namespace

EncodedState encoded_state_at(uint64_t seed, double basis_ratio, uint64_t index) {
    Basis b = unit_at(seed, kBasisStream, index) < basis_ratio ? Basis::X : Basis::Z;
    int bit = static_cast<int>(hash3_u64(seed, kBitStream, index) & 1u);
    return {b, bit};
}

std::vector<EncodedState> encode_burst(uint64_t rng_seed, uint32_t burst_len,
                                       double basis_ratio) {
    if (burst_len < 1) throw ConfigError("burst_len must be >= 1");
    if (basis_ratio <= 0.0 || basis_ratio >= 1.0)
        throw ConfigError("basis_ratio must be in (0,1)");
    std::vector<EncodedState> out;
    out.reserve(burst_len);
    for (uint32_t i = 0; i < burst_len; ++i)
        out.push_back(encoded_state_at(rng_seed, basis_ratio, i));
    return out;
}

std::vector<PulseRecord> emit_pulses_range(const SystemParams& params, uint64_t first_pulse,
                                           uint64_t count, uint64_t rng_seed) {
    SystemParams p = params;
    p.validate_and_derive();
    if (count < 1) throw ConfigError("count must be >= 1");

    double eta = p.eta_emit();
    double p_two = p.g2 * eta * eta / 2.0;
    std::vector<PulseRecord> out;
    out.reserve(static_cast<size_t>(count * eta * 1.05) + 16);
    for (uint64_t i = first_pulse; i < first_pulse + count; ++i) {
        double u = unit_at(rng_seed, kEmitStream, i);
        uint8_t pc = u < p_two ? 2 : (u < eta ? 1 : 0);
        if (!pc) continue;
        EncodedState st = encoded_state_at(rng_seed, p.basis_ratio, i);
        out.push_back({i, st.basis, static_cast<uint8_t>(st.bit), pc,
                       static_cast<double>(i) / p.source_rate_hz});
    }
    return out;
}

std::vector<PulseRecord> emit_pulses(const SystemParams& params, uint64_t n_pulses,
                                     uint64_t rng_seed) {
    return emit_pulses_range(params, 0, n_pulses, rng_seed);
}

namespace {

struct Candidate {
    double t;
    uint64_t window;
    int detector;
    bool is_dark;
};

// Measurement of one photon from pulse `window`: passive basis choice,
// misalignment/drift flip in the matched case, coin flip otherwise.
int measure_detector(uint64_t seed, uint64_t window, int which, Basis alice_basis,
                     int alice_bit, double flip_prob) {
    bool bob_x = unit_at(seed, kBobBasisStream, 2 * window + which) < 0.5;
    Basis bob = bob_x ? Basis::X : Basis::Z;
    double u = unit_at(seed, kFlipStream, 2 * window + which);
    int bit;
    if (bob == alice_basis) {
        bit = alice_bit ^ (u < flip_prob ? 1 : 0);
    } else {
        bit = u < 0.5 ? 1 : 0;
    }
    return detector_of(bob, bit);
}

void dead_time_filter(std::vector<Candidate>& cands, const SystemParams& p,
                      double last_click_t[4], TransmitStats* stats,
                      std::vector<ClickRecord>& out) {
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.t != b.t) return a.t < b.t;
        if (a.detector != b.detector) return a.detector < b.detector;
        return a.is_dark < b.is_dark;
    });
    for (const Candidate& c : cands) {
        if (c.t - last_click_t[c.detector] < p.dead_time_s) {
            if (stats) ++stats->dead_suppressed;
            continue;
        }
        last_click_t[c.detector] = c.t;
        out.push_back({c.is_dark ? kNoPulse : c.window,
                       static_cast<uint8_t>(c.detector), c.is_dark, c.t});
        if (stats) {
            if (c.is_dark)
                ++stats->dark_clicks;
            else
                ++stats->signal_clicks;
        }
    }
}

}  // namespace

std::vector<ClickRecord> transmit_and_detect(std::span<const PulseRecord> pulses,
                                             uint64_t first_pulse,
                                             uint64_t n_pulses,
                                             const SystemParams& params,
                                             DriftModel* drift,
                                             uint64_t rng_seed,
                                             TransmitStats* stats) {
    SystemParams p = params;
    p.validate_and_derive();
    if (stats) stats->pulses += n_pulses;

    double eta_path = p.eta_path();
    double p_dark = p.p_dark_per_window();
    double period = 1.0 / p.source_rate_hz;
    std::vector<Candidate> cands;

    // Dark candidates: one threshold draw per window and detector, so a
    // smaller window (lower threshold) accepts a subset for a fixed seed.
    for (uint64_t w = first_pulse; w < first_pulse + n_pulses; ++w) {
        for (int d = 0; d < 4; ++d) {
            if (unit_at(rng_seed, kDarkHitStream + d, w) < p_dark) {
                double off = (unit_at(rng_seed, kDarkOffStream + d, w) - 0.5) *
                             p.temporal_window_s;
                cands.push_back({w * period + off, w, d, true});
            }
        }
    }

    // Signal candidates per photon.
    for (const PulseRecord& pr : pulses) {
        if (pr.pulse_index < first_pulse || pr.pulse_index >= first_pulse + n_pulses)
            throw ConfigError("pulse record outside the declared window range");
        double t_nominal = pr.pulse_index * period;
        if (drift) drift->advance(t_nominal);
        for (int ph = 0; ph < pr.photon_count; ++ph) {
            uint64_t idx = 2 * pr.pulse_index + ph;
            if (unit_at(rng_seed, kSurviveStream, idx) >= eta_path) continue;
            double g = p.jitter_sigma_s * gauss_at(rng_seed, kJitterStream, idx);
            if (std::abs(g) > p.temporal_window_s / 2.0) {
                if (stats) ++stats->window_rejected;
                continue;
            }
            double flip = combined_flip(
                p.misalignment_qber,
                drift ? drift->flip_extra(pr.basis) : 0.0);
            int det = measure_detector(rng_seed, pr.pulse_index, ph, pr.basis,
                                       pr.bit, flip);
            cands.push_back({t_nominal + g, pr.pulse_index, det, false});
        }
    }

    std::vector<ClickRecord> out;
    out.reserve(cands.size());
    double last_click_t[4] = {-1e18, -1e18, -1e18, -1e18};
    dead_time_filter(cands, p, last_click_t, stats, out);

    if (stats) {
        // Count two-photon pulses that produced two surviving clicks.
        for (size_t i = 1; i < out.size(); ++i)
            if (!out[i].is_dark && !out[i - 1].is_dark &&
                out[i].pulse_index == out[i - 1].pulse_index)
                ++stats->double_clicks;
    }
    return out;
}

double expected_click_rate(const SystemParams& params) {
    SystemParams p = params;
    p.validate_and_derive();
    double eta = p.eta_emit();
    double p_two = p.g2 * eta * eta / 2.0;
    double a = p.eta_path() * jitter_accept_prob(p.jitter_sigma_s, p.temporal_window_s);
    double q_sig = (eta - p_two) * a + p_two * (2 * a - a * a);
    return p.source_rate_hz * (q_sig + 4.0 * p.p_dark_per_window());
}

Simulator::Simulator(const ExperimentConfig& cfg)
    : p_(cfg.sim),
      chunk_(cfg.post.chunk_pulses),
      basis_seed_(derive_seed(cfg.seed, seed_purpose::kAliceBasis)),
      bit_seed_(derive_seed(cfg.seed, seed_purpose::kAliceBits)),
      channel_seed_(derive_seed(cfg.seed, seed_purpose::kChannel)),
      basis_ratio_(cfg.sim.basis_ratio),
      drift_(p_, derive_seed(cfg.seed, seed_purpose::kChannel) ^ 0xD41F7),
      last_click_t_{-1e18, -1e18, -1e18, -1e18} {
    p_.validate_and_derive();

    double eta = p_.eta_emit();
    p_two_em_ = p_.g2 * eta * eta / 2.0;
    accept_prob_ = jitter_accept_prob(p_.jitter_sigma_s, p_.temporal_window_s);
    double a = p_.eta_path() * accept_prob_;
    q_signal_ = (eta - p_two_em_) * a + p_two_em_ * (2 * a - a * a);
    p_dark_ = p_.p_dark_per_window();

    signal_.rng = Rng(derive_seed(channel_seed_, kSigSkipSeed));
    signal_.prob = q_signal_;
    signal_.next = q_signal_ > 0.0 ? signal_.rng.next_geometric_skip(q_signal_)
                                   : std::numeric_limits<uint64_t>::max();
    for (int d = 0; d < 4; ++d) {
        dark_[d].rng = Rng(derive_seed(channel_seed_, kDarkSkipSeed + d));
        dark_[d].prob = p_dark_;
        dark_[d].next = p_dark_ > 0.0 ? dark_[d].rng.next_geometric_skip(p_dark_)
                                      : std::numeric_limits<uint64_t>::max();
    }
}

void Simulator::SkipStream::advance() {
    if (next == std::numeric_limits<uint64_t>::max()) return;
    uint64_t gap = rng.next_geometric_skip(prob);
    uint64_t stepped = next + 1 + gap;
    next = (stepped <= next) ? std::numeric_limits<uint64_t>::max() : stepped;
}

Basis Simulator::basis_from_seed(uint64_t chunk_seed, double basis_ratio,
                                 uint64_t offset_in_chunk) {
    return unit_at(chunk_seed, kBasisStream, offset_in_chunk) < basis_ratio
               ? Basis::X
               : Basis::Z;
}

uint64_t Simulator::chunk_basis_seed(uint64_t chunk) const {
    return derive_seed(basis_seed_, chunk);
}

Basis Simulator::alice_basis_at(uint64_t pulse) const {
    return basis_from_seed(chunk_basis_seed(pulse / chunk_), basis_ratio_,
                           pulse % chunk_);
}

int Simulator::alice_bit_at(uint64_t pulse) const {
    return static_cast<int>(hash3_u64(bit_seed_, kBitStream, pulse) & 1u);
}

void Simulator::emit_click(std::vector<ClickRecord>& out, uint64_t window,
                           int detector, bool is_dark, double t) {
    if (t - last_click_t_[detector] < p_.dead_time_s) {
        ++stats_.dead_suppressed;
        return;
    }
    last_click_t_[detector] = t;
    out.push_back({is_dark ? kNoPulse : window, static_cast<uint8_t>(detector),
                   is_dark, t});
    if (is_dark)
        ++stats_.dark_clicks;
    else
        ++stats_.signal_clicks;
}

std::vector<ClickRecord> Simulator::run_range(uint64_t count) {
    uint64_t end = next_pulse_ + count;
    double period = 1.0 / p_.source_rate_hz;
    std::vector<ClickRecord> out;
    std::vector<Candidate> cands;

    for (;;) {
        // Earliest pending event window across the five skip streams.
        uint64_t w = signal_.next;
        for (int d = 0; d < 4; ++d) w = std::min(w, dark_[d].next);
        if (w >= end) break;

        double t_nominal = w * period;
        drift_.advance(t_nominal);
        cands.clear();

        if (signal_.next == w) {
            double a = p_.eta_path() * accept_prob_;
            double p_two_clicks = p_two_em_ * a * a;
            int nclicks =
                unit_at(channel_seed_, kCompStream, w) < p_two_clicks / q_signal_
                    ? 2
                    : 1;
            if (nclicks == 2) ++stats_.double_clicks;
            Basis ab = alice_basis_at(w);
            int abit = alice_bit_at(w);
            double flip = combined_flip(p_.misalignment_qber, drift_.flip_extra(ab));
            for (int k = 0; k < nclicks; ++k) {
                double g = p_.jitter_sigma_s * gauss_at(channel_seed_, kJitterStream,
                                                        2 * w + k);
                double half = p_.temporal_window_s / 2.0;
                g = std::clamp(g, -half, half);  // acceptance folded into rate
                int det = measure_detector(channel_seed_, w, k, ab, abit, flip);
                cands.push_back({t_nominal + g, w, det, false});
            }
            signal_.advance();
        }
        for (int d = 0; d < 4; ++d) {
            if (dark_[d].next != w) continue;
            double off =
                (unit_at(channel_seed_, kDarkOffStream + d, w) - 0.5) *
                p_.temporal_window_s;
            cands.push_back({t_nominal + off, w, d, true});
            dark_[d].advance();
        }

        std::sort(cands.begin(), cands.end(),
                  [](const Candidate& a, const Candidate& b) {
                      if (a.t != b.t) return a.t < b.t;
                      return a.detector < b.detector;
                  });
        for (const Candidate& c : cands)
            emit_click(out, c.window, c.detector, c.is_dark, c.t);
    }

    drift_.advance(end * period);
    stats_.pulses += count;
    next_pulse_ = end;
    return out;
}

}  // namespace qkd::sim
