#pragma once

#include <cstdint>
#include <vector>

namespace qkd::security {

// Shannon entropy of a Bernoulli(x) bit, in bits. H(0) = H(1) = 0.
double binary_entropy(double x);

// Inverse of binary_entropy on [0, 1/2].
double binary_entropy_inv(double h);

// Probability that a pulse at the channel input carries more than one
// photon: p_m = (eta_s * eta_e)^2 * g2 / 2.
double multi_photon_prob(double g2, double eta_s, double eta_e);

// Single-photon fraction correction A = 1 - p_m / p_det.
double gllp_factor(double p_m, double p_det);

// Finite-size penalty Delta = 7*sqrt(log2(2/eps_bar)*n) + log2(1/eps_pa^2).
double delta_term(std::uint64_t n, double eps_bar, double eps_pa);

// Failure-probability budget. eps_bar/eps_pa may be given explicitly or
// filled in by optimize(); the composition
//   eps_cor + eps_pa + eps_pe + eps_bar + eps_auth <= eps_total
// is enforced by validate().
struct SecurityBudget {
    double eps_total = 1e-10;
    double eps_pe = 4e-12;
    double eps_cor = 6e-11;
    double eps_auth = 1e-12;
    double eps_bar = 0.0;
    double eps_pa = 0.0;

    void validate() const;
    bool has_split() const { return eps_bar > 0.0 && eps_pa > 0.0; }
};

// Splits the slack eps_total - (eps_pe + eps_cor + eps_auth) between
// eps_bar and eps_pa so that delta_term at block size n is minimal.
// Returns {eps_bar, eps_pa}.
std::pair<double, double> optimize_epsilons(const SecurityBudget& budget, std::uint64_t n);

// Extractable key length and where the raw bits went. All terms in bits.
struct KeyLengthResult {
    std::int64_t l_key = 0;       // floor(n*A*(1 - H(q_tilde/A)) - leak_ec - delta - leak_ev) - nu_auth, >= 0
    std::int64_t l_gross = 0;     // same floor before the nu_auth deduction, >= 0
    bool clamped = false;         // true if the formula went negative
    double multi_photon = 0.0;    // n * (1 - A)
    double phase_error = 0.0;     // n * A * H(q_tilde / A)
    double leak_ec = 0.0;
    double delta = 0.0;
    double leak_ev = 0.0;
    double nu_auth = 0.0;
    double rounding = 0.0;        // floor loss, in [0, 1)
    double eps_bar = 0.0;         // split actually used
    double eps_pa = 0.0;
};

// Finite-key length for one frame of n reconciled bits with estimated
// error bound q_tilde. If budget.has_split() is false the split is
// optimized internally.
KeyLengthResult finite_key_length(std::uint64_t n, double q_tilde, double leak_ec,
                                  double leak_ev, double nu_auth, double gllp_a,
                                  const SecurityBudget& budget);

// Asymptotic secret rate in bits/s:
//   raw_rate * sift_factor * max(0, A*(1 - H(q/A)) - f*H(q)).
double asymptotic_gllp_rate(double raw_rate_hz, double sift_factor, double q, double f,
                            double gllp_a);

struct LossSweepSpec {
    double start_db = 0.0;
    double stop_db = 30.0;
    double step_db = 2.0;

    // Raw detection rate model: anchored to a reference point by default,
    // or derived from an efficiency chain when chain_mode is true.
    bool chain_mode = false;
    double anchor_raw_bps = 47.9e3;
    double anchor_loss_db = 9.6;
    double source_rate_hz = 72.6e6;   // chain mode
    double eta_source = 0.058575;     // chain mode
    double eta_encoder = 0.55;        // chain mode
    double eta_receiver = 0.114;      // chain mode

    double intrinsic_qber = 0.0325;
    double dark_count_hz = 50.0;
    int num_detectors = 4;
    double window_s = 1e-9;
    double rep_rate_hz = 72.6e6;

    double sift_factor = 0.5;
    double efficiency_f = 1.17;
    std::uint64_t frame_n = 200000;
    std::uint64_t sample_m = 20000;
    double gllp_a = 1.0;
    SecurityBudget budget;
    double min_code_rate = 0.65;      // reconciliation support limit
    double adapt_delta = 0.05;
};

struct LossSweepRow {
    double loss_db = 0.0;
    double click_rate_hz = 0.0;
    double qber = 0.0;
    double skr_finite_bps = 0.0;
    double skr_asymptotic_bps = 0.0;
};

std::vector<LossSweepRow> rate_vs_loss_curve(const LossSweepSpec& spec);

}  // namespace qkd::security
