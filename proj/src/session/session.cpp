#include "qkd/session/session.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <utility>

#include "qkd/csv.hpp"
#include "qkd/errors.hpp"
#include "qkd/hashing/ledger.hpp"
#include "qkd/hashing/poly_hash.hpp"
#include "qkd/hashing/toeplitz.hpp"
#include "qkd/ldpc/codeset.hpp"
#include "qkd/ldpc/decode.hpp"
#include "qkd/log.hpp"
#include "qkd/protocol/estimate.hpp"
#include "qkd/protocol/frame.hpp"
#include "qkd/protocol/sift.hpp"
#include "qkd/rng.hpp"
#include "qkd/security/security.hpp"
#include "qkd/session/wire.hpp"
#include "qkd/sim/simulator.hpp"

namespace qkd::session {

namespace {

constexpr uint32_t kProtoVersion = 1;
constexpr uint64_t kControlFrame = UINT64_MAX;  // handshake / final tag
constexpr uint64_t kSeedExpandStream = 0x5EEDB175;
constexpr double kMinQberForRate = 0.001;  // floor fed to rate selection

// Peer sent ABORT; not an error of ours, so it bypasses the abort-sender.
struct PeerAborted {
    std::string reason;
};

// Integrity failure: tag or coverage mismatch. Aborts with a security alarm.
struct AuthAlarm {
    std::string reason;
};

std::pair<uint64_t, uint64_t> verify_points(uint64_t seed) {
    uint64_t x = hash3_u64(seed, 0xA, 1);
    uint64_t r = hash3_u64(seed, 0xB, 2);
    if (!x) x = 1;
    if (!r) r = 1;
    return {x, r};
}

struct EcOutcome {
    FrameStatus status = FrameStatus::Ok;
    uint64_t leak = 0;       // accumulated over attempts
    uint32_t attempts = 0;
    double rate_used = 0.0;
    BitVec key;              // reconciled payload, valid when status == Ok
};

class Endpoint {
  public:
    Endpoint(Role role, Transport& t, const ExperimentConfig& cfg)
        : cfg_(cfg), role_(role), t_(t) {
        cfg_.validate();
        sim_ = std::make_unique<sim::Simulator>(cfg_);
        n_ = cfg_.post.frame_n;
        m_ = cfg_.post.m();
        asm_ = std::make_unique<protocol::FrameAssembler>(n_, m_);
        nu_auth_ = 2u * static_cast<uint32_t>(cfg_.post.auth_tag_bits);
        total_pulses_ = static_cast<uint64_t>(
            std::llround(cfg_.post.duration_s * cfg_.sim.source_rate_hz));
        est_base_ = derive_seed(cfg_.seed, seed_purpose::kFrameEst);
        verify_base_ = derive_seed(cfg_.seed, seed_purpose::kVerify);
        pa_base_ = derive_seed(cfg_.seed, seed_purpose::kToeplitz);
        punct_base_ = derive_seed(cfg_.seed, seed_purpose::kPunctured);
        resolve_seed_ = derive_seed(cfg_.seed, seed_purpose::kResolve);
        ledger_ = std::make_unique<hashing::KeyMaterialLedger>(expand_seed_bits(
            derive_seed(cfg_.seed, seed_purpose::kBootstrap), cfg_.post.bootstrap_bits));

        double p_m = security::multi_photon_prob(cfg_.sim.g2, cfg_.sim.eta_source_cband,
                                                 cfg_.sim.eta_encoder);
        double p_det = sim::expected_click_rate(cfg_.sim) / cfg_.sim.source_rate_hz;
        gllp_a_ = security::gllp_factor(p_m, p_det);
    }

    SessionReport run() {
        report_.role = role_;
        try {
            handshake();
            eval_a_ = draw_eval();
            eval_b_ = draw_eval();
            for (;;) {
                if (asm_->frame_ready()) {
                    run_frame();
                    if (cfg_.post.max_frames && frames_total_ >= cfg_.post.max_frames) break;
                    continue;
                }
                if (next_pulse_ >= total_pulses_) break;
                run_chunk();
            }
            exchange_tags(kControlFrame);  // covers trailing sift traffic
        } catch (const PeerAborted& e) {
            report_.aborted = true;
            report_.abort_reason = e.reason;
        } catch (const AuthAlarm& e) {
            report_.aborted = true;
            report_.abort_reason = e.reason;
            send_abort(2, e.reason);
        } catch (const std::exception& e) {
            report_.aborted = true;
            report_.abort_reason = e.what();
            send_abort(1, e.what());
        }
        t_.close();
        finalize();
        return std::move(report_);
    }

  private:
    // --- wiring -----------------------------------------------------------

    void send_msg(MsgType type, uint64_t frame_id, std::vector<uint8_t> payload) {
        WireMessage m;
        m.type = type;
        m.frame_id = frame_id;
        m.seq = seq_out_++;
        m.payload = std::move(payload);
        std::vector<uint8_t> raw = encode_message(m);
        if (type != MsgType::AuthTag)
            sent_plain_.insert(sent_plain_.end(), raw.begin(), raw.end());
        t_.send(raw);
    }

    WireMessage recv_expect(MsgType want) {
        std::vector<uint8_t> raw;
        if (!recv_message_bytes(t_, raw))
            throw TransportError("peer closed the stream");
        WireMessage m = decode_message(raw);
        if (static_cast<int64_t>(m.seq) <= last_seq_in_)
            throw ProtocolError("sequence number did not increase");
        last_seq_in_ = static_cast<int64_t>(m.seq);
        if (m.type == MsgType::Abort) {
            PayloadReader r(m.payload);
            r.u8();  // code
            uint32_t len = r.u32();
            auto text = r.bytes(len);
            throw PeerAborted{"peer aborted: " + std::string(text.begin(), text.end())};
        }
        if (m.type != MsgType::AuthTag)
            recv_plain_.insert(recv_plain_.end(), raw.begin(), raw.end());
        if (m.type != want)
            throw ProtocolError(std::string("expected ") + msg_type_name(want) + ", got " +
                                msg_type_name(m.type));
        return m;
    }

    void send_abort(uint8_t code, const std::string& reason) {
        try {
            PayloadWriter w;
            w.u8(code);
            w.u32(static_cast<uint32_t>(reason.size()));
            w.bytes(std::vector<uint8_t>(reason.begin(), reason.end()));
            send_msg(MsgType::Abort, frames_total_, w.take());
        } catch (...) {
            // peer already gone; the local abort report stands
        }
    }

    // --- authentication ---------------------------------------------------

    hashing::u128 draw_eval() {
        BitVec b = ledger_->draw(128, hashing::KeyUse::AuthEvalKey);
        return (static_cast<hashing::u128>(b.word(1)) << 64) | b.word(0);
    }

    void send_tag(uint64_t frame_id, hashing::u128 eval, const BitVec& otp) {
        BitVec tag = hashing::auth_tag(sent_plain_, eval, otp, cfg_.post.auth_tag_bits);
        PayloadWriter w;
        w.u32(static_cast<uint32_t>(sent_plain_.size()));
        w.bytes(tag.to_bytes());
        sent_plain_.clear();
        send_msg(MsgType::AuthTag, frame_id, w.take());
    }

    void check_tag(hashing::u128 eval, const BitVec& otp) {
        WireMessage m = recv_expect(MsgType::AuthTag);
        PayloadReader r(m.payload);
        uint32_t covered = r.u32();
        auto tb = r.bytes((cfg_.post.auth_tag_bits + 7) / 8);
        r.expect_end();
        if (covered != recv_plain_.size())
            throw AuthAlarm{"authenticated transcript length disagrees"};
        BitVec tag = BitVec::from_bytes(tb, cfg_.post.auth_tag_bits);
        bool ok = hashing::auth_check(recv_plain_, eval, otp, tag, cfg_.post.auth_tag_bits);
        recv_plain_.clear();
        if (!ok) throw AuthAlarm{"authentication tag mismatch"};
    }

    // One tag each way. Both sides draw the pads in the same order, keeping
    // the shared ledgers aligned; Alice's tag always travels first.
    void exchange_tags(uint64_t frame_id) {
        BitVec otp_a = ledger_->draw(cfg_.post.auth_tag_bits, hashing::KeyUse::AuthOtp);
        BitVec otp_b = ledger_->draw(cfg_.post.auth_tag_bits, hashing::KeyUse::AuthOtp);
        if (role_ == Role::Alice) {
            send_tag(frame_id, eval_a_, otp_a);
            check_tag(eval_b_, otp_b);
        } else {
            check_tag(eval_a_, otp_a);
            send_tag(frame_id, eval_b_, otp_b);
        }
    }

    // --- handshake ---------------------------------------------------------

    void handshake() {
        PayloadWriter w;
        w.u32(kProtoVersion);
        w.u64(cfg_.config_hash());
        w.u8(static_cast<uint8_t>(role_));
        if (role_ == Role::Alice) {
            send_msg(MsgType::FrameAck, kControlFrame, w.take());
            check_hello();
        } else {
            check_hello();
            send_msg(MsgType::FrameAck, kControlFrame, w.take());
        }
    }

    void check_hello() {
        WireMessage m = recv_expect(MsgType::FrameAck);
        if (m.frame_id != kControlFrame) throw ProtocolError("handshake carried a frame id");
        PayloadReader r(m.payload);
        uint32_t ver = r.u32();
        uint64_t hash = r.u64();
        uint8_t peer = r.u8();
        r.expect_end();
        if (ver != kProtoVersion) throw ProtocolError("protocol version mismatch");
        if (hash != cfg_.config_hash())
            throw ProtocolError("peers run different configurations");
        if (peer == static_cast<uint8_t>(role_))
            throw ProtocolError("both peers claim the same role");
    }

    // --- sifting ------------------------------------------------------------

    bool scan_overlaps(double t0, double t1) const {
        for (const auto& s : sim_->drift().scan_windows())
            if (s.t1 > t0 && s.t0 < t1) return true;
        return false;
    }

    void run_chunk() {
        uint64_t chunk = sim_->chunk_pulses();
        uint64_t chunk_id = next_pulse_ / chunk;
        uint64_t first = next_pulse_;
        uint64_t count = std::min<uint64_t>(chunk, total_pulses_ - next_pulse_);
        double period = 1.0 / cfg_.sim.source_rate_hz;

        if (role_ == Role::Alice) {
            PayloadWriter w;
            w.u64(chunk_id);
            w.u64(first);
            w.u64(count);
            w.u64(sim_->chunk_basis_seed(chunk_id));
            send_msg(MsgType::BasisAnnounce, frames_total_, w.take());

            WireMessage m = recv_expect(MsgType::BasisAnnounce);
            PayloadReader r(m.payload);
            if (r.u64() != chunk_id) throw ProtocolError("sift reply for a different chunk");
            uint8_t discard = r.u8();
            uint32_t matched = r.u32();
            if (discard) {
                if (matched) throw ProtocolError("discarded chunk carries indices");
                ++chunks_discarded_;
                r.expect_end();
            } else {
                int64_t prev = -1;
                for (uint32_t i = 0; i < matched; ++i) {
                    uint32_t off = r.u32();
                    if (off >= count || static_cast<int64_t>(off) <= prev)
                        throw ProtocolError("matched indices not increasing in range");
                    prev = off;
                    uint64_t idx = first + off;
                    asm_->push(sim_->alice_bit_at(idx) != 0, idx * period);
                }
                r.expect_end();
            }
        } else {
            WireMessage m = recv_expect(MsgType::BasisAnnounce);
            PayloadReader r(m.payload);
            uint64_t cid = r.u64();
            uint64_t cfirst = r.u64();
            uint64_t ccount = r.u64();
            uint64_t basis_seed = r.u64();
            r.expect_end();
            if (cid != chunk_id || cfirst != first || ccount != count)
                throw ProtocolError("sift announcement out of step");

            std::vector<ClickRecord> clicks = sim_->run_range(count);
            bool discard = scan_overlaps(first * period, (first + count) * period);

            PayloadWriter w;
            w.u64(chunk_id);
            w.u8(discard ? 1 : 0);
            if (discard) {
                ++chunks_discarded_;
                w.u32(0);
            } else {
                auto assigned = protocol::assign_windows(clicks, cfg_.sim.source_rate_hz);
                double ratio = cfg_.sim.basis_ratio;
                protocol::BobSift bs = protocol::sift_bob_clicks(
                    assigned,
                    [&](uint64_t idx) {
                        return sim::Simulator::basis_from_seed(basis_seed, ratio, idx - first);
                    },
                    resolve_seed_);
                w.u32(static_cast<uint32_t>(bs.indices.size()));
                for (std::size_t k = 0; k < bs.indices.size(); ++k)
                    w.u32(static_cast<uint32_t>(bs.indices[k] - first));
                for (std::size_t k = 0; k < bs.indices.size(); ++k)
                    asm_->push(bs.bits[k] != 0, bs.timestamps[k]);
            }
            send_msg(MsgType::BasisAnnounce, frames_total_, w.take());
        }
        next_pulse_ += count;
    }

    // --- reconciliation ------------------------------------------------------

    bool plan_rate(double q_sel, ldpc::RateChoice& out) const {
        try {
            out = ldpc::select_rate(q_sel, n_, cfg_.post.adapt_delta, cfg_.post.code_rates,
                                    cfg_.post.target_efficiency);
            return true;
        } catch (const UnsupportedRateError&) {
            return false;
        }
    }

    // Fallback attempt: one rate down, whole pool shortened.
    ldpc::RateChoice retry_choice(std::size_t rate_index) const {
        auto code = ldpc::get_code(cfg_.post, rate_index, n_);
        ldpc::RateChoice rc;
        rc.rate_index = rate_index;
        rc.code_rate = cfg_.post.code_rates[rate_index];
        rc.block_len = code->n_var;
        rc.n_chk = code->n_chk;
        rc.punctured = 0;
        rc.shortened = code->pool_size;
        rc.leak_bits = code->n_chk;
        return rc;
    }

    EcOutcome alice_ec(uint64_t fid, const BitVec& payload, double q_sel) {
        EcOutcome out;
        ldpc::RateChoice choice;
        if (!plan_rate(q_sel, choice)) {
            out.status = FrameStatus::DiscardRate;
            return out;
        }
        for (uint32_t attempt = 0;; ++attempt) {
            auto code = ldpc::get_code(cfg_.post, choice.rate_index, n_);
            ldpc::RateAdaptConfig rc = ldpc::make_rate_adapt(*code, choice.punctured);
            BitVec block(code->n_var);
            for (uint32_t i = 0; i < n_; ++i) block.set(i, payload.get(i));
            for (uint32_t col : rc.punctured)
                block.set(col, hash3_u64(punct_base_, fid * 4 + attempt, col) & 1);
            BitVec synd = code->syndrome(block);
            uint64_t verify_seed = hash3_u64(verify_base_, fid, attempt);

            PayloadWriter w;
            w.u8(static_cast<uint8_t>(choice.rate_index));
            w.u8(static_cast<uint8_t>(attempt));
            w.u32(code->n_var);
            w.u32(choice.punctured);
            w.u64(verify_seed);
            w.bytes(synd.to_bytes());
            send_msg(MsgType::Syndrome, fid, w.take());

            out.leak += choice.leak_bits;
            out.rate_used = choice.code_rate;
            out.attempts = attempt + 1;

            WireMessage vm = recv_expect(MsgType::VerifyHash);
            PayloadReader r(vm.payload);
            uint8_t converged = r.u8();
            r.u32();  // iterations, informational
            uint64_t peer_tag = r.u64();
            r.expect_end();

            auto [px, pr] = verify_points(verify_seed);
            uint64_t own = hashing::verify_hash(payload, px, pr, cfg_.post.verify_tag_bits);
            bool ok = converged != 0 && peer_tag == own;
            PayloadWriter verdict;
            verdict.u8(ok ? 1 : 0);
            send_msg(MsgType::VerifyHash, fid, verdict.take());

            if (ok) {
                out.key = payload;
                return out;
            }
            if (attempt == 0 && choice.rate_index > 0) {
                choice = retry_choice(choice.rate_index - 1);
                continue;
            }
            out.status = converged ? FrameStatus::DiscardVerify : FrameStatus::DiscardDecode;
            return out;
        }
    }

    EcOutcome bob_ec(uint64_t fid, const BitVec& payload, double q_sel) {
        EcOutcome out;
        ldpc::RateChoice choice;
        if (!plan_rate(q_sel, choice)) {
            out.status = FrameStatus::DiscardRate;
            return out;
        }
        for (uint32_t attempt = 0;; ++attempt) {
            auto code = ldpc::get_code(cfg_.post, choice.rate_index, n_);
            ldpc::RateAdaptConfig rc = ldpc::make_rate_adapt(*code, choice.punctured);

            WireMessage sm = recv_expect(MsgType::Syndrome);
            if (sm.frame_id != fid) throw ProtocolError("syndrome for a different frame");
            PayloadReader r(sm.payload);
            uint8_t rate_index = r.u8();
            uint8_t att = r.u8();
            uint32_t block_len = r.u32();
            uint32_t punctured = r.u32();
            uint64_t verify_seed = r.u64();
            auto sb = r.bytes((code->n_chk + 7) / 8);
            r.expect_end();
            if (rate_index != choice.rate_index || att != attempt ||
                block_len != code->n_var || punctured != choice.punctured)
                throw ProtocolError("reconciliation plans disagree");
            BitVec synd = BitVec::from_bytes(sb, code->n_chk);

            BitVec noisy(code->n_var);
            for (uint32_t i = 0; i < n_; ++i) noisy.set(i, payload.get(i));
            ldpc::DecodeResult dec =
                ldpc::decode(*code, rc, noisy, synd, q_sel, cfg_.post.bp_max_iters);
            BitVec corrected = dec.bits.slice(0, n_);

            auto [px, pr] = verify_points(verify_seed);
            uint64_t tag = hashing::verify_hash(corrected, px, pr, cfg_.post.verify_tag_bits);
            PayloadWriter w;
            w.u8(dec.converged ? 1 : 0);
            w.u32(dec.iters);
            w.u64(tag);
            send_msg(MsgType::VerifyHash, fid, w.take());

            out.leak += choice.leak_bits;
            out.rate_used = choice.code_rate;
            out.attempts = attempt + 1;

            WireMessage vm = recv_expect(MsgType::VerifyHash);
            PayloadReader vr(vm.payload);
            uint8_t ok = vr.u8();
            vr.expect_end();
            if (ok && !dec.converged)
                throw ProtocolError("peer accepted an unconverged attempt");
            if (ok) {
                out.key = std::move(corrected);
                return out;
            }
            if (attempt == 0 && choice.rate_index > 0) {
                choice = retry_choice(choice.rate_index - 1);
                continue;
            }
            out.status = dec.converged ? FrameStatus::DiscardVerify : FrameStatus::DiscardDecode;
            return out;
        }
    }

    // --- privacy amplification ----------------------------------------------

    security::KeyLengthResult key_length(double q_tilde, const EcOutcome& ec) const {
        return security::finite_key_length(
            n_, q_tilde, static_cast<double>(ec.leak),
            static_cast<double>(cfg_.post.verify_tag_bits) * ec.attempts,
            static_cast<double>(nu_auth_), gllp_a_, cfg_.post.budget);
    }

    void apply_pa(const BitVec& key, const security::KeyLengthResult& kl, uint64_t pa_seed) {
        if (kl.l_gross <= 0) return;
        std::size_t gross = static_cast<std::size_t>(kl.l_gross);
        BitVec tseed = expand_seed_bits(pa_seed, n_ + gross - 1);
        BitVec out = hashing::toeplitz_hash(key, tseed, gross);
        // The first nu_auth bits replenish the authentication pool; the rest
        // is dispensed key. When a frame distills less than nu_auth, bank it
        // all and dispense nothing.
        std::size_t banked = std::min<std::size_t>(gross, nu_auth_);
        ledger_->deposit(out.slice(0, banked));
        if (gross > banked) report_.key_material.append(out.slice(banked, gross - banked));
    }

    // --- frame ---------------------------------------------------------------

    void run_frame() {
        uint64_t fid = frames_total_;
        protocol::FrameWindow win = asm_->pop_window();
        double q_hat = 0.0;
        EcOutcome ec;

        if (role_ == Role::Alice) {
            uint64_t est_seed = hash3_u64(est_base_, fid, 0);
            protocol::SiftedFrame fr = protocol::build_frame(fid, win.bits, est_seed, n_, m_);
            PayloadWriter w;
            w.u64(est_seed);
            w.u32(m_);
            w.bytes(fr.est_bits.to_bytes());
            send_msg(MsgType::SampleDisclose, fid, w.take());

            WireMessage m = recv_expect(MsgType::SampleDisclose);
            if (m.frame_id != fid) throw ProtocolError("sample reply for a different frame");
            PayloadReader r(m.payload);
            uint32_t mismatches = r.u32();
            r.expect_end();
            if (mismatches > m_) throw ProtocolError("mismatch count exceeds the sample");
            q_hat = static_cast<double>(mismatches) / m_;

            ec = alice_ec(fid, fr.key_bits, std::max(q_hat, kMinQberForRate));
            finish_frame_alice(fid, fr.key_bits, q_hat, ec);
        } else {
            WireMessage m = recv_expect(MsgType::SampleDisclose);
            if (m.frame_id != fid) throw ProtocolError("sample for a different frame");
            PayloadReader r(m.payload);
            uint64_t est_seed = r.u64();
            uint32_t sample_m = r.u32();
            if (sample_m != m_) throw ProtocolError("sample size disagrees with config");
            BitVec alice_est = BitVec::from_bytes(r.bytes((m_ + 7) / 8), m_);
            r.expect_end();

            protocol::SiftedFrame fr = protocol::build_frame(fid, win.bits, est_seed, n_, m_);
            BitVec diff = alice_est;
            diff ^= fr.est_bits;
            uint32_t mismatches = static_cast<uint32_t>(diff.popcount());
            PayloadWriter w;
            w.u32(mismatches);
            send_msg(MsgType::SampleDisclose, fid, w.take());
            q_hat = static_cast<double>(mismatches) / m_;

            ec = bob_ec(fid, fr.key_bits, std::max(q_hat, kMinQberForRate));
            finish_frame_bob(fid, q_hat, ec);
        }
    }

    void finish_frame_alice(uint64_t fid, const BitVec&, double q_hat, const EcOutcome& ec) {
        double q_tilde = protocol::qber_upper_bound(q_hat, m_, cfg_.post.budget.eps_pe);
        uint64_t l_key = 0;
        if (ec.status == FrameStatus::Ok) {
            security::KeyLengthResult kl = key_length(q_tilde, ec);
            uint64_t pa_seed = hash3_u64(pa_base_, fid, 0);
            PayloadWriter w;
            w.u32(static_cast<uint32_t>(kl.l_key));
            w.u64(pa_seed);
            send_msg(MsgType::PaSeed, fid, w.take());
            apply_pa(ec.key, kl, pa_seed);
            l_key = static_cast<uint64_t>(kl.l_key);
        }

        WireMessage am = recv_expect(MsgType::FrameAck);
        if (am.frame_id != fid) throw ProtocolError("ack for a different frame");
        PayloadReader r(am.payload);
        uint8_t status = r.u8();
        uint32_t peer_l = r.u32();
        r.expect_end();
        if (status != static_cast<uint8_t>(ec.status) || peer_l != l_key)
            throw ProtocolError("frame outcome disagreement");

        exchange_tags(fid);
        log_frame(fid, q_hat, q_tilde, ec, l_key);
    }

    void finish_frame_bob(uint64_t fid, double q_hat, const EcOutcome& ec) {
        double q_tilde = protocol::qber_upper_bound(q_hat, m_, cfg_.post.budget.eps_pe);
        uint64_t l_key = 0;
        if (ec.status == FrameStatus::Ok) {
            WireMessage pm = recv_expect(MsgType::PaSeed);
            if (pm.frame_id != fid) throw ProtocolError("seed for a different frame");
            PayloadReader r(pm.payload);
            uint32_t wire_l = r.u32();
            uint64_t pa_seed = r.u64();
            r.expect_end();
            security::KeyLengthResult kl = key_length(q_tilde, ec);
            if (wire_l != static_cast<uint32_t>(kl.l_key))
                throw ProtocolError("secret key length disagreement");
            apply_pa(ec.key, kl, pa_seed);
            l_key = static_cast<uint64_t>(kl.l_key);
        }

        PayloadWriter w;
        w.u8(static_cast<uint8_t>(ec.status));
        w.u32(static_cast<uint32_t>(l_key));
        send_msg(MsgType::FrameAck, fid, w.take());

        exchange_tags(fid);
        log_frame(fid, q_hat, q_tilde, ec, l_key);
    }

    void log_frame(uint64_t fid, double q_hat, double q_tilde, const EcOutcome& ec,
                   uint64_t l_key) {
        FrameLog fl;
        fl.frame_id = fid;
        fl.q_hat = q_hat;
        fl.q_tilde = q_tilde;
        fl.rate_used = ec.rate_used;
        fl.leak_ec = ec.leak;
        fl.l_key = l_key;
        fl.status = ec.status;
        report_.frames.push_back(fl);
        ++frames_total_;
        if (ec.status == FrameStatus::Ok) ++frames_ok_;
        secret_bits_ += l_key;
        log_info("frame ", fid, ": q_hat=", q_hat, " status=", frame_status_name(ec.status),
                 " l_key=", l_key);
    }

    void finalize() {
        report_.frames_total = frames_total_;
        report_.frames_ok = frames_ok_;
        report_.secret_bits = secret_bits_;
        report_.pulses = next_pulse_;
        report_.chunks_discarded = chunks_discarded_;
        report_.sim_duration_s = next_pulse_ / cfg_.sim.source_rate_hz;
        report_.skr_bps =
            report_.sim_duration_s > 0 ? secret_bits_ / report_.sim_duration_s : 0.0;
        report_.auth_drawn_bits = ledger_->drawn_total();
        report_.auth_deposited_bits = ledger_->total_deposited();
    }

    // --- state ---------------------------------------------------------------

    ExperimentConfig cfg_;
    Role role_;
    Transport& t_;
    std::unique_ptr<sim::Simulator> sim_;
    std::unique_ptr<protocol::FrameAssembler> asm_;
    std::unique_ptr<hashing::KeyMaterialLedger> ledger_;

    uint32_t n_ = 0, m_ = 0;
    uint32_t nu_auth_ = 0;
    uint64_t total_pulses_ = 0;
    uint64_t est_base_ = 0, verify_base_ = 0, pa_base_ = 0, punct_base_ = 0;
    uint64_t resolve_seed_ = 0;
    double gllp_a_ = 1.0;

    uint64_t seq_out_ = 0;
    int64_t last_seq_in_ = -1;
    std::vector<uint8_t> sent_plain_, recv_plain_;
    hashing::u128 eval_a_ = 0, eval_b_ = 0;

    uint64_t next_pulse_ = 0;
    uint64_t frames_total_ = 0, frames_ok_ = 0;
    uint64_t secret_bits_ = 0;
    uint64_t chunks_discarded_ = 0;

    SessionReport report_;
};

}  // namespace

const char* frame_status_name(FrameStatus s) {
    switch (s) {
        case FrameStatus::Ok: return "ok";
        case FrameStatus::DiscardVerify: return "discard_verify";
        case FrameStatus::DiscardDecode: return "discard_decode";
        case FrameStatus::DiscardRate: return "discard_rate";
    }
    return "unknown";
}

SessionReport run_session(Role role, Transport& t, const ExperimentConfig& cfg) {
    Endpoint ep(role, t, cfg);
    return ep.run();
}

BitVec expand_seed_bits(uint64_t seed, std::size_t nbits) {
    std::vector<uint8_t> bytes((nbits + 7) / 8);
    for (std::size_t i = 0; i < bytes.size(); i += 8) {
        uint64_t w = hash3_u64(seed, kSeedExpandStream, i / 8);
        for (std::size_t j = 0; j < 8 && i + j < bytes.size(); ++j)
            bytes[i + j] = static_cast<uint8_t>(w >> (8 * j));
    }
    return BitVec::from_bytes(bytes, nbits);
}

namespace {
const std::vector<std::string> kFrameCols = {"frame_id", "q_hat",  "q_tilde", "rate_used",
                                             "leak_ec",  "l_key", "status"};

FrameStatus status_from_name(const std::string& s) {
    if (s == "ok") return FrameStatus::Ok;
    if (s == "discard_verify") return FrameStatus::DiscardVerify;
    if (s == "discard_decode") return FrameStatus::DiscardDecode;
    if (s == "discard_rate") return FrameStatus::DiscardRate;
    throw ConfigError("unknown frame status: " + s);
}
}  // namespace

void write_frame_csv(const std::string& path, const std::vector<FrameLog>& frames) {
    CsvWriter w(path, "session-frames", 1, kFrameCols);
    for (const FrameLog& f : frames)
        w.row({std::to_string(f.frame_id), csv_num(f.q_hat), csv_num(f.q_tilde),
               csv_num(f.rate_used), std::to_string(f.leak_ec), std::to_string(f.l_key),
               frame_status_name(f.status)});
}

std::vector<FrameLog> read_frame_csv(const std::string& path) {
    CsvReader rd(path, "session-frames", 1, kFrameCols);
    std::vector<FrameLog> out;
    std::vector<std::string> cells;
    while (rd.next(cells)) {
        FrameLog f;
        f.frame_id = std::stoull(cells[0]);
        f.q_hat = std::stod(cells[1]);
        f.q_tilde = std::stod(cells[2]);
        f.rate_used = std::stod(cells[3]);
        f.leak_ec = std::stoull(cells[4]);
        f.l_key = std::stoull(cells[5]);
        f.status = status_from_name(cells[6]);
        out.push_back(f);
    }
    return out;
}

std::string session_summary(const SessionReport& r) {
    std::ostringstream os;
    os << (r.role == Role::Alice ? "alice" : "bob") << ": " << r.frames_ok << "/"
       << r.frames_total << " frames ok, " << r.secret_bits << " secret bits in "
       << csv_num(r.sim_duration_s) << " s simulated (" << csv_num(r.skr_bps) << " bit/s)";
    if (r.chunks_discarded) os << ", " << r.chunks_discarded << " chunks lost to scans";
    os << ", auth drew " << r.auth_drawn_bits << " bits / banked " << r.auth_deposited_bits;
    if (r.aborted) os << "\nABORTED: " << r.abort_reason;
    return os.str();
}

}  // namespace qkd::session
