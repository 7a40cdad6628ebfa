// Command-line front end: simulation runs, live protocol endpoints, the
// rate-vs-loss sweep, and the leakage report. Every command is deterministic
// under (config, seed); outputs land in the configured directory.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qkd/csv.hpp"
#include "qkd/errors.hpp"
#include "qkd/ldpc/rate_adapt.hpp"
#include "qkd/params.hpp"
#include "qkd/records.hpp"
#include "qkd/security/security.hpp"
#include "qkd/session/session.hpp"
#include "qkd/session/transport.hpp"
#include "qkd/sim/simulator.hpp"

namespace {

using namespace qkd;

struct CommonArgs {
    std::string config_path;
    uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& c) {
    cmd->add_option("--config", c.config_path, "Config file (flat key=value)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "Master RNG seed (overrides the config)")
        ->each([&c](const std::string&) { c.seed_set = true; });
    cmd->add_option("--out", c.out_dir, "Output directory (overrides the config)");
}

ExperimentConfig make_config(const CommonArgs& c) {
    ExperimentConfig cfg = c.config_path.empty() ? ExperimentConfig{} : load_config(c.config_path);
    if (c.seed_set) cfg.seed = c.seed;
    if (!c.out_dir.empty()) cfg.out_dir = c.out_dir;
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    return cfg;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

void write_config_used(const ExperimentConfig& cfg) {
    std::ofstream f(out_path(cfg, "config_used.cfg"));
    f << dump_config(cfg);
}

uint64_t fnv1a64(const std::vector<uint8_t>& bytes) {
    uint64_t h = 1469598103934665603ULL;
    for (uint8_t b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string key_digest(const BitVec& key) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(key.to_bytes())));
    return std::string(buf) + " over " + std::to_string(key.size()) + " bits";
}

// --- simulate ---------------------------------------------------------------

int cmd_simulate(const CommonArgs& args) {
    ExperimentConfig cfg = make_config(args);
    write_config_used(cfg);

    uint64_t total = static_cast<uint64_t>(
        std::llround(cfg.post.duration_s * cfg.sim.source_rate_hz));
    constexpr uint64_t kChunk = 8u << 20;

    uint64_t emit_seed = derive_seed(cfg.seed, seed_purpose::kAliceBits);
    uint64_t chan_seed = derive_seed(cfg.seed, seed_purpose::kChannel);
    sim::DriftModel drift(cfg.sim, chan_seed ^ 0xD41F7);

    std::ofstream pf(out_path(cfg, "pulses.rec"), std::ios::binary);
    std::ofstream cf(out_path(cfg, "clicks.rec"), std::ios::binary);
    sim::TransmitStats stats;
    uint64_t pulse_records = 0, clicks = 0;

    for (uint64_t first = 0; first < total; first += kChunk) {
        uint64_t count = std::min(kChunk, total - first);
        auto pulses = sim::emit_pulses_range(cfg.sim, first, count, emit_seed);
        auto cl = sim::transmit_and_detect(pulses, first, count, cfg.sim, &drift,
                                           chan_seed, &stats);
        write_pulse_records(pf, pulses);
        write_click_records(cf, cl);
        pulse_records += pulses.size();
        clicks += cl.size();
    }

    double dur = total / cfg.sim.source_rate_hz;
    double measured = clicks / dur;
    double expected = sim::expected_click_rate(cfg.sim);

    std::ostringstream os;
    os << "pulses simulated:   " << total << " (" << csv_num(dur) << " s)\n"
       << "non-empty pulses:   " << pulse_records << "\n"
       << "clicks:             " << clicks << " (" << stats.signal_clicks << " signal, "
       << stats.dark_clicks << " dark)\n"
       << "dead-time losses:   " << stats.dead_suppressed << "\n"
       << "window rejections:  " << stats.window_rejected << "\n"
       << "double clicks:      " << stats.double_clicks << "\n"
       << "click rate:         " << csv_num(measured) << " /s\n"
       << "analytic rate:      " << csv_num(expected) << " /s\n";
    std::cout << os.str();
    std::ofstream sf(out_path(cfg, "summary.txt"));
    sf << os.str();
    return 0;
}

// --- alice / bob ------------------------------------------------------------

int run_endpoint(session::Role role, const CommonArgs& args, const std::string& endpoint,
                 bool listen) {
    ExperimentConfig cfg = make_config(args);
    write_config_used(cfg);

    auto [host, port] = session::parse_endpoint(endpoint);
    std::unique_ptr<session::TcpTransport> t =
        listen ? session::TcpTransport::listen_accept(host, port)
               : session::TcpTransport::connect(host, port);

    session::SessionReport rep = session::run_session(role, *t, cfg);
    const char* name = role == session::Role::Alice ? "alice" : "bob";
    session::write_frame_csv(out_path(cfg, std::string("frames_") + name + ".csv"),
                             rep.frames);
    std::cout << session::session_summary(rep) << "\n";
    if (!rep.aborted) std::cout << "key digest: " << key_digest(rep.key_material) << "\n";
    return rep.aborted ? 1 : 0;
}

// --- sweep --------------------------------------------------------------------

bool parse_range(const std::string& s, double& a, double& b, double& step) {
    size_t p1 = s.find(':');
    size_t p2 = s.find(':', p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos) return false;
    try {
        a = std::stod(s.substr(0, p1));
        b = std::stod(s.substr(p1 + 1, p2 - p1 - 1));
        step = std::stod(s.substr(p2 + 1));
    } catch (...) {
        return false;
    }
    return step > 0.0;
}

int cmd_sweep(const CommonArgs& args, const std::string& loss_range) {
    ExperimentConfig cfg = make_config(args);
    write_config_used(cfg);

    security::LossSweepSpec spec;
    if (!loss_range.empty() &&
        !parse_range(loss_range, spec.start_db, spec.stop_db, spec.step_db))
        throw ConfigError("--loss-db wants START:STOP:STEP with STEP > 0");
    spec.source_rate_hz = cfg.sim.source_rate_hz;
    spec.rep_rate_hz = cfg.sim.source_rate_hz;
    spec.dark_count_hz = cfg.sim.dark_count_hz;
    spec.window_s = cfg.sim.temporal_window_s;
    spec.frame_n = cfg.post.frame_n;
    spec.sample_m = cfg.post.m();
    spec.budget = cfg.post.budget;
    spec.efficiency_f = cfg.post.target_efficiency;
    spec.min_code_rate = cfg.post.code_rates.front();
    spec.adapt_delta = cfg.post.adapt_delta;
    double p_m = security::multi_photon_prob(cfg.sim.g2, cfg.sim.eta_source_cband,
                                             cfg.sim.eta_encoder);
    spec.gllp_a = security::gllp_factor(p_m, cfg.sim.detector_efficiency);

    std::vector<security::LossSweepRow> rows = security::rate_vs_loss_curve(spec);
    CsvWriter w(out_path(cfg, "sweep.csv"), "rate-vs-loss", 1,
                {"loss_db", "click_rate_hz", "qber", "skr_finite_bps", "skr_asymptotic_bps"});
    for (const auto& r : rows)
        w.row({csv_num(r.loss_db), csv_num(r.click_rate_hz), csv_num(r.qber),
               csv_num(r.skr_finite_bps), csv_num(r.skr_asymptotic_bps)});
    std::cout << rows.size() << " rows -> " << out_path(cfg, "sweep.csv") << "\n";
    return 0;
}

// --- report ---------------------------------------------------------------------

struct Breakdown {
    double multi_photon = 0, phase_error = 0, leak_ec = 0, delta = 0;
    double leak_ev = 0, nu_auth = 0, rounding = 0;
    double total() const {
        return multi_photon + phase_error + leak_ec + delta + leak_ev + nu_auth + rounding;
    }
};

int cmd_report(const CommonArgs& args, const std::string& frames_csv) {
    ExperimentConfig cfg = make_config(args);
    std::vector<session::FrameLog> frames = session::read_frame_csv(frames_csv);

    uint32_t n = cfg.post.frame_n;
    uint32_t m = cfg.post.m();
    double nu_auth = 2.0 * cfg.post.auth_tag_bits;
    double p_m = security::multi_photon_prob(cfg.sim.g2, cfg.sim.eta_source_cband,
                                             cfg.sim.eta_encoder);
    double p_det = sim::expected_click_rate(cfg.sim) / cfg.sim.source_rate_hz;
    double gllp_a = security::gllp_factor(p_m, p_det);

    std::cout << "frame        EC     delta        EV   auth     PE(phase)  multi-ph  "
                 "rounding  l_key  fraction\n";
    Breakdown agg;
    uint64_t ok_frames = 0, secret = 0;
    for (const session::FrameLog& f : frames) {
        if (f.status != session::FrameStatus::Ok) {
            std::cout << f.frame_id << "  discarded ("
                      << session::frame_status_name(f.status) << ")\n";
            continue;
        }
        // Recover the verification disclosure: a frame whose recorded leak
        // matches the first-attempt plan carried one tag, otherwise two.
        uint32_t attempts = 2;
        try {
            ldpc::RateChoice plan =
                ldpc::select_rate(std::max(f.q_hat, 0.001), n, cfg.post.adapt_delta,
                                  cfg.post.code_rates, cfg.post.target_efficiency);
            if (plan.leak_bits == f.leak_ec) attempts = 1;
        } catch (const UnsupportedRateError&) {
        }
        security::KeyLengthResult kl = security::finite_key_length(
            n, f.q_tilde, static_cast<double>(f.leak_ec),
            static_cast<double>(cfg.post.verify_tag_bits) * attempts, nu_auth, gllp_a,
            cfg.post.budget);
        Breakdown b{kl.multi_photon, kl.phase_error, kl.leak_ec, kl.delta,
                    kl.leak_ev,      kl.nu_auth,     kl.rounding};
        double spent = static_cast<double>(n) - static_cast<double>(kl.l_key);
        if (kl.l_key == 0 && kl.clamped) spent = b.total();  // formula went negative
        if (std::abs(spent - b.total()) > 1.0) {
            std::cerr << "frame " << f.frame_id << ": categories sum to " << b.total()
                      << ", expected " << spent << "\n";
            return 2;
        }
        if (static_cast<uint64_t>(kl.l_key) != f.l_key) {
            std::cerr << "frame " << f.frame_id << ": log says l_key = " << f.l_key
                      << ", recomputed " << kl.l_key << "\n";
            return 2;
        }
        std::printf("%5llu %9.0f %9.1f %9.0f %6.0f %13.1f %9.1f %9.2f %6lld %9.4f\n",
                    static_cast<unsigned long long>(f.frame_id), b.leak_ec, b.delta,
                    b.leak_ev, b.nu_auth, b.phase_error, b.multi_photon, b.rounding,
                    static_cast<long long>(kl.l_key),
                    static_cast<double>(kl.l_key) / (n + m));
        agg.multi_photon += b.multi_photon;
        agg.phase_error += b.phase_error;
        agg.leak_ec += b.leak_ec;
        agg.delta += b.delta;
        agg.leak_ev += b.leak_ev;
        agg.nu_auth += b.nu_auth;
        agg.rounding += b.rounding;
        ++ok_frames;
        secret += f.l_key;
    }
    if (!ok_frames) {
        std::cout << "no successful frames in the log\n";
        return 0;
    }
    double spent_total = agg.total();
    std::cout << "\naggregate over " << ok_frames << " frames (share of bits spent):\n";
    auto share = [&](const char* name, double v) {
        std::printf("  %-12s %12.0f  %6.2f%%\n", name, v, 100.0 * v / spent_total);
    };
    share("EC", agg.leak_ec);
    share("delta", agg.delta);
    share("EV", agg.leak_ev);
    share("auth", agg.nu_auth);
    share("phase error", agg.phase_error);
    share("multi-photon", agg.multi_photon);
    share("rounding", agg.rounding);
    std::printf("  secret fraction: %.4f (%llu bits over %llu raw)\n",
                static_cast<double>(secret) / (ok_frames * static_cast<double>(n + m)),
                static_cast<unsigned long long>(secret),
                static_cast<unsigned long long>(ok_frames) * (n + m));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-photon BB84 toolkit: simulation, live endpoints, analysis"};
    app.require_subcommand(1);

    CommonArgs sim_args, alice_args, bob_args, sweep_args, report_args;
    std::string connect_ep, listen_ep, loss_range, frames_csv;

    CLI::App* c_sim = app.add_subcommand("simulate", "Run the photonic chain, write records");
    add_common(c_sim, sim_args);

    CLI::App* c_alice = app.add_subcommand("alice", "Run the transmitter-side endpoint");
    add_common(c_alice, alice_args);
    c_alice->add_option("--connect", connect_ep, "Peer address HOST:PORT")->required();

    CLI::App* c_bob = app.add_subcommand("bob", "Run the receiver-side endpoint");
    add_common(c_bob, bob_args);
    c_bob->add_option("--listen", listen_ep, "Bind address HOST:PORT")->required();

    CLI::App* c_sweep = app.add_subcommand("sweep", "Secret key rate vs channel loss");
    add_common(c_sweep, sweep_args);
    c_sweep->add_option("--loss-db", loss_range, "Loss range START:STOP:STEP in dB");

    CLI::App* c_report = app.add_subcommand("report", "Leakage breakdown of a frame log");
    add_common(c_report, report_args);
    c_report->add_option("frames", frames_csv, "Per-frame session CSV")
        ->required()
        ->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_sim->parsed()) return cmd_simulate(sim_args);
        if (c_alice->parsed())
            return run_endpoint(qkd::session::Role::Alice, alice_args, connect_ep, false);
        if (c_bob->parsed())
            return run_endpoint(qkd::session::Role::Bob, bob_args, listen_ep, true);
        if (c_sweep->parsed()) return cmd_sweep(sweep_args, loss_range);
        if (c_report->parsed()) return cmd_report(report_args, frames_csv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
