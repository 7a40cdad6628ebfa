#include "qkd/ldpc/rate_adapt.hpp"

#include <algorithm>
#include <cmath>

#include "qkd/errors.hpp"
#include "qkd/security/security.hpp"

namespace qkd::ldpc {

double effective_rate_formula(double code_rate, uint32_t block_len,
                              uint32_t punctured, uint32_t shortened) {
    double nb = block_len;
    return (code_rate * nb - punctured) / (nb - punctured - shortened);
}

void RateAdaptConfig::validate(const LdpcCode& code) const {
    auto in_pool = [&](uint32_t v) {
        return v >= code.payload_len() && v < code.n_var;
    };
    for (uint32_t v : punctured)
        if (!in_pool(v)) throw ConfigError("punctured column outside the pool");
    for (uint32_t v : shortened)
        if (!in_pool(v)) throw ConfigError("shortened column outside the pool");
    if (!std::is_sorted(punctured.begin(), punctured.end()) ||
        !std::is_sorted(shortened.begin(), shortened.end()))
        throw ConfigError("rate-adapt position lists must be sorted");
    std::vector<uint32_t> overlap;
    std::set_intersection(punctured.begin(), punctured.end(), shortened.begin(),
                          shortened.end(), std::back_inserter(overlap));
    if (!overlap.empty())
        throw ConfigError("punctured and shortened sets overlap");
    if (punctured.size() + shortened.size() != code.pool_size)
        throw ConfigError("pool split does not cover the pool");
    double expect = effective_rate_formula(
        code.code_rate, code.n_var, static_cast<uint32_t>(punctured.size()),
        static_cast<uint32_t>(shortened.size()));
    if (std::abs(expect - effective_rate) > 1e-12)
        throw ConfigError("effective_rate inconsistent with counts");
}

RateAdaptConfig make_rate_adapt(const LdpcCode& code, uint32_t n_punctured) {
    if (n_punctured > code.pool_size)
        throw ConfigError("puncture count exceeds the pool");
    uint32_t payload = code.payload_len();

    // A punctured symbol starts the decoder with zero channel information,
    // and a check with two of them passes no information at all in the
    // first iteration. Select the punctured subset so checks stay singly
    // covered as long as the pool allows, then fall back to the least
    // crowded columns. Deterministic, so both peers derive the same split.
    std::vector<uint8_t> check_hit(code.n_chk, 0);
    std::vector<uint8_t> taken(code.pool_size, 0);
    uint32_t need = n_punctured;

    auto col_checks = [&](uint32_t pool_i) {
        uint32_t v = payload + pool_i;
        return std::pair<uint32_t, uint32_t>(code.var_off[v], code.var_off[v + 1]);
    };
    for (uint32_t i = 0; i < code.pool_size && need; ++i) {
        auto [b, e] = col_checks(i);
        bool clean = true;
        for (uint32_t k = b; k < e && clean; ++k) clean = !check_hit[code.var_nbr[k]];
        if (!clean) continue;
        taken[i] = 1;
        --need;
        for (uint32_t k = b; k < e; ++k) check_hit[code.var_nbr[k]] = 1;
    }
    while (need) {
        uint32_t best = UINT32_MAX, best_score = UINT32_MAX;
        for (uint32_t i = 0; i < code.pool_size; ++i) {
            if (taken[i]) continue;
            auto [b, e] = col_checks(i);
            uint32_t score = 0;
            for (uint32_t k = b; k < e; ++k) score += check_hit[code.var_nbr[k]];
            if (score < best_score) {
                best_score = score;
                best = i;
            }
        }
        taken[best] = 1;
        --need;
        auto [b, e] = col_checks(best);
        for (uint32_t k = b; k < e; ++k) check_hit[code.var_nbr[k]] = 1;
    }

    RateAdaptConfig rc;
    for (uint32_t i = 0; i < code.pool_size; ++i)
        (taken[i] ? rc.punctured : rc.shortened).push_back(payload + i);
    rc.effective_rate = effective_rate_formula(
        code.code_rate, code.n_var, n_punctured, code.pool_size - n_punctured);
    rc.validate(code);
    return rc;
}

uint32_t block_len_for(uint32_t payload_n, double delta) {
    if (delta < 0.0 || delta >= 0.5)
        throw ConfigError("adapt delta must be in [0,0.5)");
    return static_cast<uint32_t>(std::lround(payload_n / (1.0 - delta)));
}

RateChoice select_rate(double q, uint32_t payload_n, double delta,
                       const std::vector<double>& rates, double target_f) {
    if (q <= 0.0 || q > 0.11)
        throw UnsupportedRateError("qber outside the supported domain (0, 0.11]");
    if (rates.empty()) throw ConfigError("empty rate list");
    if (!std::is_sorted(rates.begin(), rates.end()))
        throw ConfigError("rate list must be ascending");

    uint32_t nb = block_len_for(payload_n, delta);
    uint32_t d = nb - payload_n;
    uint64_t target = static_cast<uint64_t>(
        std::ceil(target_f * payload_n * security::binary_entropy(q)));

    // Highest rate first: smallest syndrome wins if it can reach the target
    // leakage after puncturing.
    for (size_t i = rates.size(); i-- > 0;) {
        uint32_t m_c = static_cast<uint32_t>(std::lround((1.0 - rates[i]) * nb));
        RateChoice choice;
        choice.rate_index = i;
        choice.code_rate = rates[i];
        choice.block_len = nb;
        choice.n_chk = m_c;
        if (target + d <= m_c) {
            // Even fully punctured this code leaks more than the target asks;
            // it is still the least-leakage option available.
            choice.punctured = d;
            choice.shortened = 0;
            choice.leak_bits = m_c - d;
            return choice;
        }
        if (target <= m_c) {
            choice.punctured = static_cast<uint32_t>(m_c - target);
            choice.shortened = d - choice.punctured;
            choice.leak_bits = static_cast<uint32_t>(target);
            return choice;
        }
    }
    throw UnsupportedRateError("no base code supports qber " + std::to_string(q));
}

EfficiencyReport measure_efficiency(const std::vector<EfficiencyRun>& runs) {
    EfficiencyReport rep;
    double leak_sum = 0.0, shannon_sum = 0.0;
    for (const auto& r : runs) {
        ++rep.frames;
        if (!r.converged) continue;
        ++rep.converged;
        leak_sum += static_cast<double>(r.leak_bits);
        shannon_sum += r.payload_n * security::binary_entropy(r.qber);
    }
    if (rep.frames) rep.convergence = double(rep.converged) / rep.frames;
    if (shannon_sum > 0.0) rep.f = leak_sum / shannon_sum;
    return rep;
}

}  // namespace qkd::ldpc
