#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qkd/errors.hpp"
#include "qkd/security/security.hpp"

using namespace qkd;
using namespace qkd::security;

TEST_CASE("binary entropy fixed points") {
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(binary_entropy(0.0325) == doctest::Approx(0.2067783098654222).epsilon(1e-12));
    CHECK(binary_entropy(0.0404) == doctest::Approx(0.24412317802149708).epsilon(1e-12));
    CHECK(binary_entropy(0.11) == doctest::Approx(0.499915958164528).epsilon(1e-12));
    CHECK(binary_entropy(0.001) == doctest::Approx(0.011407757737461138).epsilon(1e-12));
}

TEST_CASE("binary entropy symmetry and concavity") {
    for (double x : {0.01, 0.1, 0.2, 0.3, 0.47}) {
        CHECK(binary_entropy(x) == doctest::Approx(binary_entropy(1.0 - x)).epsilon(1e-14));
        // Strictly increasing on (0, 1/2).
        CHECK(binary_entropy(x) < binary_entropy(x + 0.02));
    }
}

TEST_CASE("binary entropy inverse round trips") {
    for (double x : {0.001, 0.01, 0.05, 0.11, 0.25, 0.49}) {
        double h = binary_entropy(x);
        CHECK(binary_entropy_inv(h) == doctest::Approx(x).epsilon(1e-9));
    }
    CHECK(binary_entropy_inv(0.0) == doctest::Approx(0.0));
    // The entropy curve is quadratically flat at 1/2, so the inverse can
    // only be located to ~sqrt(eps) there.
    CHECK(binary_entropy_inv(1.0) == doctest::Approx(0.5).epsilon(1e-7));
}

TEST_CASE("multi photon probability closed form") {
    // (eta_s * eta_e)^2 * g2 / 2 for the quantum-dot source chain.
    double p = multi_photon_prob(0.0047, 0.058, 0.55);
    CHECK(p == doctest::Approx(2.391383500000001e-06).epsilon(1e-12));
    // Against the headline one-significant-figure value.
    CHECK(std::abs(p - 2.5e-6) < 0.5e-6);
    CHECK(multi_photon_prob(0.0, 0.058, 0.55) == 0.0);
    // Quadratic in the pre-channel efficiency.
    CHECK(multi_photon_prob(0.0047, 0.116, 0.55) == doctest::Approx(4 * p).epsilon(1e-12));
}

TEST_CASE("gllp factor") {
    CHECK(gllp_factor(0.0, 0.5) == 1.0);
    CHECK(gllp_factor(2.5e-6, 0.83) == doctest::Approx(0.9999969879518072).epsilon(1e-15));
    double pdet = 4.0292837465564737e-4;  // nominal per-pulse click probability
    CHECK(gllp_factor(2.3913835e-6, pdet) == doctest::Approx(0.9940649910742977).epsilon(1e-10));
}

TEST_CASE("asymptotic gllp rate reproduces the anchor operating point") {
    double a = gllp_factor(2.5e-6, 0.83);
    double r = asymptotic_gllp_rate(47.9e3, 0.5, 0.0325, 1.17, a);
    CHECK(r == doctest::Approx(13203.352368867865).epsilon(1e-9));
    CHECK(r == doctest::Approx(13.2e3).epsilon(0.02));
    // Zero when reconciliation costs exceed the phase-error margin.
    CHECK(asymptotic_gllp_rate(47.9e3, 0.5, 0.12, 1.17, a) == 0.0);
    // Linear in the raw rate.
    CHECK(asymptotic_gllp_rate(95.8e3, 0.5, 0.0325, 1.17, a) ==
          doctest::Approx(2 * r).epsilon(1e-12));
}

TEST_CASE("delta term frozen value and scaling") {
    CHECK(delta_term(200000, 2e-11, 2e-11) ==
          doctest::Approx(18994.714432816025).epsilon(1e-12));
    CHECK(delta_term(200000, 1.75e-11, 1.75e-11) ==
          doctest::Approx(19044.916798819773).epsilon(1e-12));
    CHECK(delta_term(20000, 2e-11, 2e-11) ==
          doctest::Approx(6055.260295029831).epsilon(1e-12));
    // Grows like sqrt(n) plus a constant.
    double d1 = delta_term(100000, 1e-11, 1e-11);
    double d4 = delta_term(400000, 1e-11, 1e-11);
    double c = 2 * std::log2(1e11);
    CHECK((d4 - c) == doctest::Approx(2 * (d1 - c)).epsilon(1e-12));
    // Tighter failure budgets cost more.
    CHECK(delta_term(200000, 1e-12, 1e-11) > delta_term(200000, 1e-11, 1e-11));
    CHECK(delta_term(200000, 1e-11, 1e-12) > delta_term(200000, 1e-11, 1e-11));
}

TEST_CASE("security budget composition is enforced") {
    SecurityBudget b;  // defaults: total 1e-10, pe 4e-12, cor 6e-11, auth 1e-12
    CHECK_FALSE(b.has_split());
    b.eps_bar = 1.75e-11;
    b.eps_pa = 1.75e-11;
    CHECK(b.has_split());
    CHECK_NOTHROW(b.validate());
    b.eps_pa = 2.6e-11;  // pushes the sum over eps_total
    CHECK_THROWS_AS(b.validate(), ConfigError);
    b = SecurityBudget{};
    b.eps_total = 0.0;
    CHECK_THROWS_AS(b.validate(), ConfigError);
}

TEST_CASE("epsilon optimizer stays within budget and beats the even split") {
    SecurityBudget b;
    auto [eb, ep] = optimize_epsilons(b, 200000);
    CHECK(eb > 0.0);
    CHECK(ep > 0.0);
    double slack = b.eps_total - (b.eps_pe + b.eps_cor + b.eps_auth);
    CHECK(eb + ep <= slack * (1 + 1e-9));
    CHECK(delta_term(200000, eb, ep) <= delta_term(200000, slack / 2, slack / 2) + 1e-9);
    // Numeric optimum for these inputs sits near 18799.8.
    CHECK(delta_term(200000, eb, ep) == doctest::Approx(18799.84).epsilon(2e-4));
}

TEST_CASE("finite key length frozen frame") {
    // Field-like frame: n = 200k reconciled bits, q_tilde from a 4.04%
    // estimate over 20k samples, 57125 bits of syndrome disclosure, 34-bit
    // verify tag, 172 bits of authentication spend, explicit even split.
    SecurityBudget b;
    b.eps_bar = 1.75e-11;
    b.eps_pa = 1.75e-11;
    double a = 0.9940649910742977;
    auto r = finite_key_length(200000, 0.07046171331864454, 57125, 34, 172, a, b);
    CHECK_FALSE(r.clamped);
    CHECK(r.l_gross == 49205);
    CHECK(r.l_key == 49033);
    CHECK(r.leak_ec == 57125.0);
    CHECK(r.leak_ev == 34.0);
    CHECK(r.nu_auth == 172.0);
    CHECK(r.delta == doctest::Approx(19044.916798819773).epsilon(1e-12));
    CHECK(r.eps_bar == 1.75e-11);
    CHECK(r.eps_pa == 1.75e-11);
    double ratio = static_cast<double>(r.l_key) / 220000.0;
    CHECK(ratio > 0.20);
    CHECK(ratio < 0.26);
}

TEST_CASE("finite key length internal optimization only helps") {
    SecurityBudget even;
    even.eps_bar = 1.75e-11;
    even.eps_pa = 1.75e-11;
    SecurityBudget open;  // optimizer picks the split
    double a = 0.9940649910742977;
    auto re = finite_key_length(200000, 0.0704617, 57125, 34, 172, a, even);
    auto ro = finite_key_length(200000, 0.0704617, 57125, 34, 172, a, open);
    CHECK(ro.l_key >= re.l_key);
    CHECK(ro.eps_bar + ro.eps_pa <=
          (open.eps_total - open.eps_pe - open.eps_cor - open.eps_auth) * (1 + 1e-9));
}

TEST_CASE("finite key breakdown accounts for every raw bit") {
    SecurityBudget b;
    for (double qt : {0.03, 0.05, 0.0704617, 0.1}) {
        for (uint64_t n : {20000ull, 100000ull, 200000ull}) {
            CAPTURE(qt);
            CAPTURE(n);
            auto r = finite_key_length(n, qt, 0.25 * n, 34, 172, 0.994, b);
            if (r.clamped) continue;
            double sum = r.multi_photon + r.phase_error + r.leak_ec + r.delta + r.leak_ev +
                         r.nu_auth + r.rounding + static_cast<double>(r.l_key);
            CHECK(sum == doctest::Approx(static_cast<double>(n)).epsilon(1e-9));
            CHECK(r.rounding >= 0.0);
            CHECK(r.rounding < 1.0);
            CHECK(r.l_gross == r.l_key + 172);
        }
    }
}

TEST_CASE("finite key length is monotone in its costs") {
    SecurityBudget b;
    double a = 0.994;
    auto base = finite_key_length(200000, 0.05, 50000, 34, 172, a, b);
    CHECK(finite_key_length(200000, 0.06, 50000, 34, 172, a, b).l_key < base.l_key);
    CHECK(finite_key_length(200000, 0.05, 55000, 34, 172, a, b).l_key < base.l_key);
    CHECK(finite_key_length(200000, 0.05, 50000, 340, 172, a, b).l_key < base.l_key);
    CHECK(finite_key_length(200000, 0.05, 50000, 34, 344, a, b).l_key < base.l_key);
    CHECK(finite_key_length(400000, 0.05, 50000, 34, 172, a, b).l_key > base.l_key);
    // Worse single-photon fraction can only hurt.
    CHECK(finite_key_length(200000, 0.05, 50000, 34, 172, 0.98, b).l_key <= base.l_key);
}

TEST_CASE("finite key length clamps instead of going negative") {
    SecurityBudget b;
    auto r = finite_key_length(20000, 0.11, 18000, 34, 172, 0.994, b);
    CHECK(r.clamped);
    CHECK(r.l_key == 0);
    CHECK(r.l_gross == 0);
}

TEST_CASE("loss sweep covers the grid and orders finite under asymptotic") {
    LossSweepSpec spec;
    spec.gllp_a = gllp_factor(2.3913835e-6, 0.83);
    auto rows = rate_vs_loss_curve(spec);
    REQUIRE(rows.size() == 16);  // 0,2,...,30
    CHECK(rows.front().loss_db == 0.0);
    CHECK(rows.back().loss_db == 30.0);
    for (size_t i = 0; i < rows.size(); ++i) {
        CAPTURE(rows[i].loss_db);
        CHECK(rows[i].click_rate_hz > 0.0);
        CHECK(rows[i].qber >= spec.intrinsic_qber);
        if (rows[i].skr_asymptotic_bps > 0.0)
            CHECK(rows[i].skr_finite_bps < rows[i].skr_asymptotic_bps);
        if (i > 0) {
            CHECK(rows[i].click_rate_hz < rows[i - 1].click_rate_hz);
            CHECK(rows[i].qber >= rows[i - 1].qber - 1e-12);
            CHECK(rows[i].skr_asymptotic_bps <= rows[i - 1].skr_asymptotic_bps + 1e-9);
        }
    }
    // The grid point nearest the 9.6 dB anchor is 10 dB.
    size_t i96 = 0;
    double bestd = 1e9;
    for (size_t i = 0; i < rows.size(); ++i)
        if (std::abs(rows[i].loss_db - 9.6) < bestd) {
            bestd = std::abs(rows[i].loss_db - 9.6);
            i96 = i;
        }
    CHECK(rows[i96].loss_db == 10.0);
    // Interpolate by the anchor model instead: rerun with the grid pinned
    // to the anchor loss.
    LossSweepSpec one = spec;
    one.start_db = 9.6;
    one.stop_db = 9.6;
    auto anchor = rate_vs_loss_curve(one);
    REQUIRE(anchor.size() == 1);
    CHECK(anchor[0].click_rate_hz == doctest::Approx(47.9e3).epsilon(0.001));
    CHECK(anchor[0].skr_asymptotic_bps == doctest::Approx(13.2e3).epsilon(0.05));
}
