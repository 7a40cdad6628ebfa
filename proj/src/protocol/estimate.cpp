#include "qkd/protocol/estimate.hpp"

#include <cmath>
#include <stdexcept>

namespace qkd::protocol {

double estimate_qber(const BitVec& alice_sample, const BitVec& bob_sample) {
    if (alice_sample.size() != bob_sample.size())
        throw std::invalid_argument("estimate_qber: sample length mismatch");
    if (alice_sample.empty()) throw std::invalid_argument("estimate_qber: empty sample");
    BitVec diff = alice_sample;
    diff ^= bob_sample;
    return static_cast<double>(diff.popcount()) / static_cast<double>(diff.size());
}

double qber_upper_bound(double q_hat, std::uint64_t m, double eps_pe) {
    if (q_hat < 0.0 || q_hat > 1.0) throw std::invalid_argument("qber_upper_bound: q_hat outside [0,1]");
    if (m == 0) throw std::invalid_argument("qber_upper_bound: m must be positive");
    if (eps_pe <= 0.0 || eps_pe >= 1.0)
        throw std::invalid_argument("qber_upper_bound: eps_pe outside (0,1)");
    double md = static_cast<double>(m);
    double penalty =
        0.5 * std::sqrt((2.0 * std::log(1.0 / eps_pe) + 2.0 * std::log(md + 1.0)) / md);
    double q = q_hat + penalty;
    return q > 0.5 ? 0.5 : q;
}

}  // namespace qkd::protocol
