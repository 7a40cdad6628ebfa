#include "qkd/params.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "qkd/errors.hpp"
#include "qkd/rng.hpp"

namespace qkd {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

void check_unit(double v, const char* name) {
    require(v >= 0.0 && v <= 1.0, std::string(name) + " must be in [0,1]");
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        require(pos == v.size(), "trailing junk in value for " + key);
        return d;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
    }
}

uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        unsigned long long u = std::stoull(v, &pos, 0);
        require(pos == v.size(), "trailing junk in value for " + key);
        return u;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for " + key + ": '" + v + "'");
    }
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::istringstream is(v);
    std::string tok;
    while (is >> tok) {
        if (!tok.empty() && tok.back() == ',') tok.pop_back();
        if (tok.empty()) continue;
        out.push_back(parse_double(key, tok));
    }
    require(!out.empty(), key + " must list at least one value");
    return out;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void SystemParams::validate_and_derive() {
    require(source_rate_hz > 0, "source_rate_hz must be positive");
    check_unit(eta_qd, "eta_qd");
    check_unit(eta_transport, "eta_transport");
    check_unit(eta_fc, "eta_fc");
    check_unit(eta_encoder, "eta_encoder");
    check_unit(eta_receiver, "eta_receiver");
    check_unit(detector_efficiency, "detector_efficiency");
    require(g2 >= 0.0 && g2 < 1.0, "g2 must be in [0,1)");
    require(channel_loss_db >= 0.0, "channel_loss_db must be >= 0");

    double src = eta_qd * eta_transport * eta_fc;
    if (eta_source_cband <= 0.0) {
        eta_source_cband = src;
    } else {
        require(std::abs(eta_source_cband - src) <= 1e-12 + 1e-9 * src,
                "eta_source_cband inconsistent with eta_qd*eta_transport*eta_fc");
    }
    double ch = std::pow(10.0, -channel_loss_db / 10.0);
    if (eta_channel <= 0.0) {
        eta_channel = ch;
    } else {
        require(std::abs(eta_channel - ch) <= 1e-12 + 1e-9 * ch,
                "eta_channel inconsistent with channel_loss_db");
    }

    require(dark_count_hz >= 0, "dark_count_hz must be >= 0");
    require(dead_time_s >= 0, "dead_time_s must be >= 0");
    require(temporal_window_s > 0, "temporal_window_s must be positive");
    require(temporal_window_s <= 1.0 / source_rate_hz,
            "temporal_window_s exceeds the pulse period");
    require(burst_len > 0, "burst_len must be positive");
    require(basis_ratio > 0.0 && basis_ratio < 1.0, "basis_ratio must be in (0,1)");
    check_unit(misalignment_qber, "misalignment_qber");
    require(misalignment_qber < 0.5, "misalignment_qber must be < 0.5");
    require(jitter_sigma_s >= 0, "jitter_sigma_s must be >= 0");
    require(drift_step_rad >= 0, "drift_step_rad must be >= 0");
    require(drift_interval_s > 0, "drift_interval_s must be positive");
    require(compensation_interval_s > 0, "compensation_interval_s must be positive");
    require(compensation_threshold_qber > 0 && compensation_threshold_qber < 0.5,
            "compensation_threshold_qber must be in (0,0.5)");
    require(scan_step_rad > 0, "scan_step_rad must be positive");
    require(scan_dwell_s > 0, "scan_dwell_s must be positive");
}

void PostParams::validate() const {
    require(frame_n >= 1000, "frame_n must be at least 1000");
    require(sample_fraction > 0.0 && sample_fraction < 0.5,
            "sample_fraction must be in (0,0.5)");
    require(m() >= 100, "estimation sample too small (need >= 100 bits)");
    budget.validate();
    require(!code_rates.empty(), "code_rates must not be empty");
    for (double r : code_rates)
        require(r > 0.0 && r < 1.0, "code rates must be in (0,1)");
    require(std::is_sorted(code_rates.begin(), code_rates.end()),
            "code_rates must be sorted ascending");
    require(adapt_delta > 0.0 && adapt_delta < 0.5, "adapt_delta must be in (0,0.5)");
    require(target_efficiency >= 1.0, "target_efficiency must be >= 1");
    require(bp_max_iters >= 1, "bp_max_iters must be >= 1");
    require(max_var_degree >= 2 && max_var_degree <= 15,
            "max_var_degree must be in [2,15]");
    require(verify_tag_bits > 0 && verify_tag_bits <= 64,
            "verify_tag_bits must be in (0,64]");
    require(auth_tag_bits > 0 && auth_tag_bits <= 128,
            "auth_tag_bits must be in (0,128]");
    require(bootstrap_bits >= 512, "bootstrap_bits must be >= 512");
    require(chunk_pulses >= 1024, "chunk_pulses must be >= 1024");
    require(duration_s > 0 || max_frames > 0,
            "need a positive duration_s or max_frames");
}

void ExperimentConfig::validate() {
    sim.validate_and_derive();
    post.validate();
    auto exists = [](const std::string& p) {
        std::ifstream f(p);
        return f.good();
    };
    if (!post.degree_dir.empty())
        require(exists(post.degree_dir + "/rates.txt"),
                "degree_dir has no rates.txt: " + post.degree_dir);
    (void)exists;
}

namespace {

// One row per config key: getter for canonical dump, setter for parse.
struct KeyDef {
    const char* name;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

const std::vector<KeyDef>& key_table() {
    static const std::vector<KeyDef> table = [] {
        std::vector<KeyDef> t;
        auto add_d = [&t](const char* name, double SystemParams::* m) {
            t.push_back({name,
                         [m](const ExperimentConfig& c) { return fmt_double(c.sim.*m); },
                         [m, name](ExperimentConfig& c, const std::string& v) {
                             c.sim.*m = parse_double(name, v);
                         }});
        };
        auto add_pd = [&t](const char* name, double PostParams::* m) {
            t.push_back({name,
                         [m](const ExperimentConfig& c) { return fmt_double(c.post.*m); },
                         [m, name](ExperimentConfig& c, const std::string& v) {
                             c.post.*m = parse_double(name, v);
                         }});
        };
        auto add_pu = [&t](const char* name, uint32_t PostParams::* m) {
            t.push_back({name,
                         [m](const ExperimentConfig& c) { return std::to_string(c.post.*m); },
                         [m, name](ExperimentConfig& c, const std::string& v) {
                             c.post.*m = static_cast<uint32_t>(parse_u64(name, v));
                         }});
        };
        auto add_bd = [&t](const char* name, double security::SecurityBudget::* m) {
            t.push_back({name,
                         [m](const ExperimentConfig& c) { return fmt_double(c.post.budget.*m); },
                         [m, name](ExperimentConfig& c, const std::string& v) {
                             c.post.budget.*m = parse_double(name, v);
                         }});
        };

        add_d("source_rate_hz", &SystemParams::source_rate_hz);
        add_d("eta_qd", &SystemParams::eta_qd);
        add_d("eta_transport", &SystemParams::eta_transport);
        add_d("eta_fc", &SystemParams::eta_fc);
        add_d("eta_source_cband", &SystemParams::eta_source_cband);
        add_d("g2", &SystemParams::g2);
        add_d("eta_encoder", &SystemParams::eta_encoder);
        add_d("channel_loss_db", &SystemParams::channel_loss_db);
        add_d("eta_channel", &SystemParams::eta_channel);
        add_d("eta_receiver", &SystemParams::eta_receiver);
        add_d("detector_efficiency", &SystemParams::detector_efficiency);
        add_d("dark_count_hz", &SystemParams::dark_count_hz);
        add_d("dead_time_s", &SystemParams::dead_time_s);
        add_d("temporal_window_s", &SystemParams::temporal_window_s);
        t.push_back({"burst_len",
                     [](const ExperimentConfig& c) { return std::to_string(c.sim.burst_len); },
                     [](ExperimentConfig& c, const std::string& v) {
                         c.sim.burst_len = static_cast<uint32_t>(parse_u64("burst_len", v));
                     }});
        add_d("basis_ratio", &SystemParams::basis_ratio);
        add_d("misalignment_qber", &SystemParams::misalignment_qber);
        add_d("jitter_sigma_s", &SystemParams::jitter_sigma_s);
        add_d("drift_step_rad", &SystemParams::drift_step_rad);
        add_d("drift_interval_s", &SystemParams::drift_interval_s);
        add_d("compensation_interval_s", &SystemParams::compensation_interval_s);
        add_d("compensation_threshold_qber", &SystemParams::compensation_threshold_qber);
        add_d("scan_step_rad", &SystemParams::scan_step_rad);
        add_d("scan_dwell_s", &SystemParams::scan_dwell_s);

        add_pu("frame_n", &PostParams::frame_n);
        add_pd("sample_fraction", &PostParams::sample_fraction);
        add_bd("eps_total", &security::SecurityBudget::eps_total);
        add_bd("eps_pe", &security::SecurityBudget::eps_pe);
        add_bd("eps_cor", &security::SecurityBudget::eps_cor);
        add_bd("eps_auth", &security::SecurityBudget::eps_auth);
        add_bd("eps_bar", &security::SecurityBudget::eps_bar);
        add_bd("eps_pa", &security::SecurityBudget::eps_pa);
        t.push_back({"code_rates",
                     [](const ExperimentConfig& c) {
                         std::string s;
                         for (double r : c.post.code_rates) {
                             if (!s.empty()) s += ' ';
                             s += fmt_double(r);
                         }
                         return s;
                     },
                     [](ExperimentConfig& c, const std::string& v) {
                         c.post.code_rates = parse_list("code_rates", v);
                     }});
        add_pd("adapt_delta", &PostParams::adapt_delta);
        add_pd("target_efficiency", &PostParams::target_efficiency);
        add_pu("bp_max_iters", &PostParams::bp_max_iters);
        add_pu("max_var_degree", &PostParams::max_var_degree);
        t.push_back({"degree_dir",
                     [](const ExperimentConfig& c) { return c.post.degree_dir; },
                     [](ExperimentConfig& c, const std::string& v) { c.post.degree_dir = v; }});
        t.push_back({"codeset_dir",
                     [](const ExperimentConfig& c) { return c.post.codeset_dir; },
                     [](ExperimentConfig& c, const std::string& v) { c.post.codeset_dir = v; }});
        t.push_back({"verify_tag_bits",
                     [](const ExperimentConfig& c) { return std::to_string(c.post.verify_tag_bits); },
                     [](ExperimentConfig& c, const std::string& v) {
                         c.post.verify_tag_bits = static_cast<int>(parse_u64("verify_tag_bits", v));
                     }});
        t.push_back({"auth_tag_bits",
                     [](const ExperimentConfig& c) { return std::to_string(c.post.auth_tag_bits); },
                     [](ExperimentConfig& c, const std::string& v) {
                         c.post.auth_tag_bits = static_cast<int>(parse_u64("auth_tag_bits", v));
                     }});
        add_pu("bootstrap_bits", &PostParams::bootstrap_bits);
        t.push_back({"chunk_pulses",
                     [](const ExperimentConfig& c) { return std::to_string(c.post.chunk_pulses); },
                     [](ExperimentConfig& c, const std::string& v) {
                         c.post.chunk_pulses = parse_u64("chunk_pulses", v);
                     }});
        add_pu("max_frames", &PostParams::max_frames);
        add_pd("duration_s", &PostParams::duration_s);

        t.push_back({"seed",
                     [](const ExperimentConfig& c) { return std::to_string(c.seed); },
                     [](ExperimentConfig& c, const std::string& v) {
                         c.seed = parse_u64("seed", v);
                     }});
        t.push_back({"out_dir",
                     [](const ExperimentConfig& c) { return c.out_dir; },
                     [](ExperimentConfig& c, const std::string& v) { c.out_dir = v; }});
        return t;
    }();
    return table;
}

}  // namespace

ExperimentConfig parse_config(const std::map<std::string, std::string>& kv) {
    ExperimentConfig cfg;
    cfg.sim.eta_source_cband = 0.0;  // rederive unless given
    cfg.sim.eta_channel = 0.0;
    for (const auto& [key, value] : kv) {
        const KeyDef* def = nullptr;
        for (const auto& d : key_table())
            if (key == d.name) {
                def = &d;
                break;
            }
        if (!def) throw ConfigError("unknown config key: " + key);
        def->set(cfg, value);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
        if (kv.count(key))
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": duplicate key " + key);
        kv[key] = value;
    }
    return parse_config(kv);
}

std::string dump_config(const ExperimentConfig& cfg) {
    std::string out;
    for (const auto& d : key_table()) {
        out += d.name;
        out += " = ";
        out += d.get(cfg);
        out += '\n';
    }
    return out;
}

uint64_t ExperimentConfig::config_hash() const {
    // FNV-1a over the canonical dump, then one avalanche pass. The dump
    // includes derived values, so any effective difference shows up.
    std::string dump = dump_config(*this);
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : dump) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return mix64(h);
}

uint64_t derive_seed(uint64_t master, uint64_t purpose) {
    return mix64(master ^ mix64(purpose));
}

}  // namespace qkd
