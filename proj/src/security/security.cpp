#include "qkd/security/security.hpp"

#include <cmath>
#include <stdexcept>

#include "qkd/errors.hpp"
#include "qkd/protocol/estimate.hpp"

namespace qkd::security {

double binary_entropy(double x) {
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("binary_entropy: x outside [0,1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double binary_entropy_inv(double h) {
    if (h < 0.0 || h > 1.0) throw std::invalid_argument("binary_entropy_inv: h outside [0,1]");
    double lo = 0.0, hi = 0.5;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (binary_entropy(mid) < h)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double multi_photon_prob(double g2, double eta_s, double eta_e) {
    if (g2 < 0.0 || eta_s < 0.0 || eta_s > 1.0 || eta_e < 0.0 || eta_e > 1.0)
        throw std::invalid_argument("multi_photon_prob: parameter out of range");
    double eta = eta_s * eta_e;
    return eta * eta * g2 / 2.0;
}

double gllp_factor(double p_m, double p_det) {
    if (p_det <= 0.0 || p_det > 1.0) throw std::invalid_argument("gllp_factor: p_det outside (0,1]");
    if (p_m < 0.0) throw std::invalid_argument("gllp_factor: negative p_m");
    double a = 1.0 - p_m / p_det;
    if (a <= 0.0) throw std::invalid_argument("gllp_factor: multi-photon rate exceeds detection rate");
    return a;
}

double delta_term(std::uint64_t n, double eps_bar, double eps_pa) {
    if (n == 0) throw std::invalid_argument("delta_term: n must be positive");
    if (eps_bar <= 0.0 || eps_pa <= 0.0)
        throw std::invalid_argument("delta_term: epsilons must be positive");
    return 7.0 * std::sqrt(std::log2(2.0 / eps_bar) * static_cast<double>(n)) +
           std::log2(1.0 / (eps_pa * eps_pa));
}

void SecurityBudget::validate() const {
    if (eps_total <= 0.0 || eps_pe <= 0.0 || eps_cor <= 0.0 || eps_auth <= 0.0)
        throw ConfigError("security budget: epsilons must be positive");
    if (has_split()) {
        double sum = eps_cor + eps_pa + eps_pe + eps_bar + eps_auth;
        if (sum > eps_total)
            throw ConfigError("security budget: composition exceeds eps_total");
    } else if (eps_pe + eps_cor + eps_auth >= eps_total) {
        throw ConfigError("security budget: no slack left for eps_bar/eps_pa");
    }
}

std::pair<double, double> optimize_epsilons(const SecurityBudget& budget, std::uint64_t n) {
    double slack = budget.eps_total - budget.eps_pe - budget.eps_cor - budget.eps_auth;
    if (slack <= 0.0) throw ConfigError("optimize_epsilons: no slack in budget");

    auto cost = [&](double t) { return delta_term(n, t * slack, (1.0 - t) * slack); };

    // delta_term is convex in the split fraction; golden-section search.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 1e-9, b = 1.0 - 1e-9;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = cost(c), fd = cost(d);
    for (int i = 0; i < 120; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = cost(d);
        }
    }
    double t = 0.5 * (a + b);
    return {t * slack, (1.0 - t) * slack};
}

KeyLengthResult finite_key_length(std::uint64_t n, double q_tilde, double leak_ec,
                                  double leak_ev, double nu_auth, double gllp_a,
                                  const SecurityBudget& budget) {
    if (n == 0) throw std::invalid_argument("finite_key_length: n must be positive");
    if (q_tilde < 0.0 || q_tilde > 0.5)
        throw std::invalid_argument("finite_key_length: q_tilde outside [0, 1/2]");
    if (gllp_a <= 0.0 || gllp_a > 1.0)
        throw std::invalid_argument("finite_key_length: A outside (0, 1]");
    if (leak_ec < 0.0 || leak_ev < 0.0 || nu_auth < 0.0)
        throw std::invalid_argument("finite_key_length: negative leakage");
    budget.validate();

    KeyLengthResult r;
    if (budget.has_split()) {
        r.eps_bar = budget.eps_bar;
        r.eps_pa = budget.eps_pa;
    } else {
        auto [eb, ep] = optimize_epsilons(budget, n);
        r.eps_bar = eb;
        r.eps_pa = ep;
    }

    double nd = static_cast<double>(n);
    double ratio = q_tilde / gllp_a;
    if (ratio > 0.5) ratio = 0.5;
    r.multi_photon = nd * (1.0 - gllp_a);
    r.phase_error = nd * gllp_a * binary_entropy(ratio);
    r.leak_ec = leak_ec;
    r.delta = delta_term(n, r.eps_bar, r.eps_pa);
    r.leak_ev = leak_ev;
    r.nu_auth = nu_auth;

    double raw = nd * gllp_a * (1.0 - binary_entropy(ratio)) - leak_ec - r.delta - leak_ev;
    double floored = std::floor(raw);
    r.rounding = raw - floored;
    if (floored < 0.0) {
        r.l_gross = 0;
        r.rounding = 0.0;
    } else {
        r.l_gross = static_cast<std::int64_t>(floored);
    }
    double l = floored - nu_auth;
    if (l < 0.0) {
        r.l_key = 0;
        r.clamped = true;
    } else {
        r.l_key = static_cast<std::int64_t>(l);
    }
    return r;
}

double asymptotic_gllp_rate(double raw_rate_hz, double sift_factor, double q, double f,
                            double gllp_a) {
    if (raw_rate_hz < 0.0 || sift_factor < 0.0 || sift_factor > 1.0)
        throw std::invalid_argument("asymptotic_gllp_rate: bad rate/sift factor");
    if (q < 0.0 || q > 0.5) throw std::invalid_argument("asymptotic_gllp_rate: q outside [0, 1/2]");
    if (f < 1.0) throw std::invalid_argument("asymptotic_gllp_rate: f below 1");
    double ratio = q / gllp_a;
    if (ratio > 0.5) ratio = 0.5;
    double per_bit = gllp_a * (1.0 - binary_entropy(ratio)) - f * binary_entropy(q);
    if (per_bit < 0.0) per_bit = 0.0;
    return raw_rate_hz * sift_factor * per_bit;
}

std::vector<LossSweepRow> rate_vs_loss_curve(const LossSweepSpec& spec) {
    if (spec.step_db <= 0.0) throw std::invalid_argument("rate_vs_loss_curve: step must be positive");
    if (spec.stop_db < spec.start_db)
        throw std::invalid_argument("rate_vs_loss_curve: empty loss range");
    SecurityBudget budget = spec.budget;
    budget.validate();
    if (!budget.has_split()) {
        auto [eb, ep] = optimize_epsilons(budget, spec.frame_n);
        budget.eps_bar = eb;
        budget.eps_pa = ep;
    }

    // Accepted dark rate is loss-independent: every pulse window is open.
    double dark_acc = spec.dark_count_hz * spec.num_detectors * spec.window_s * spec.rep_rate_hz;

    // Highest QBER the code set can still reconcile at efficiency f.
    double h_max = (1.0 - spec.min_code_rate) / ((1.0 - spec.adapt_delta) * spec.efficiency_f);
    double q_max_rec = h_max >= 1.0 ? 0.5 : binary_entropy_inv(h_max);

    std::vector<LossSweepRow> rows;
    for (double loss = spec.start_db; loss <= spec.stop_db + 1e-9; loss += spec.step_db) {
        double signal;
        if (spec.chain_mode) {
            signal = spec.source_rate_hz * spec.eta_source * spec.eta_encoder *
                     std::pow(10.0, -loss / 10.0) * spec.eta_receiver;
        } else {
            signal = spec.anchor_raw_bps * std::pow(10.0, -(loss - spec.anchor_loss_db) / 10.0);
        }
        double clicks = signal + dark_acc;
        double qber = (spec.intrinsic_qber * signal + 0.5 * dark_acc) / clicks;

        LossSweepRow row;
        row.loss_db = loss;
        row.click_rate_hz = clicks;
        row.qber = qber;
        row.skr_asymptotic_bps =
            qber <= 0.5 ? asymptotic_gllp_rate(clicks, spec.sift_factor, qber, spec.efficiency_f,
                                               spec.gllp_a)
                        : 0.0;

        if (qber <= q_max_rec) {
            double q_tilde = protocol::qber_upper_bound(qber, spec.sample_m, budget.eps_pe);
            double leak_ec = spec.efficiency_f * static_cast<double>(spec.frame_n) *
                             binary_entropy(qber);
            KeyLengthResult kl = finite_key_length(spec.frame_n, q_tilde, leak_ec, 34.0, 172.0,
                                                   spec.gllp_a, budget);
            double frames_per_s = spec.sift_factor * clicks /
                                  static_cast<double>(spec.frame_n + spec.sample_m);
            row.skr_finite_bps = static_cast<double>(kl.l_key) * frames_per_s;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace qkd::security
