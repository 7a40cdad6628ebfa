#include "qkd/ldpc/decode.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "qkd/errors.hpp"

namespace qkd::ldpc {

namespace {

constexpr double kPinnedLlr = 40.0;   // shortened columns
constexpr double kMsgClamp = 38.0;    // keeps tanh away from exact +-1
constexpr double kProdClamp = 1.0 - 1e-15;

}  // namespace

DecodeResult decode(const LdpcCode& code, const RateAdaptConfig& rc,
                    const BitVec& noisy_bits, const BitVec& target_syndrome,
                    double channel_qber, uint32_t max_iters) {
    if (noisy_bits.size() != code.n_var)
        throw ProtocolError("decode: block length mismatch");
    if (target_syndrome.size() != code.n_chk)
        throw ProtocolError("decode: syndrome length mismatch");
    if (!(channel_qber > 0.0 && channel_qber < 0.5))
        throw ProtocolError("decode: channel_qber must be in (0, 0.5)");
    if (max_iters < 1) throw ProtocolError("decode: max_iters must be >= 1");

    uint32_t n = code.n_var;
    uint64_t ne = code.edges();
    double ch = std::log((1.0 - channel_qber) / channel_qber);

    std::vector<double> llr(n);
    for (uint32_t v = 0; v < n; ++v)
        llr[v] = noisy_bits.get(v) ? -ch : ch;
    for (uint32_t v : rc.punctured) llr[v] = 0.0;
    for (uint32_t v : rc.shortened) llr[v] = kPinnedLlr;

    // Messages live on the check-side edge ordering; chk_nbr doubles as the
    // edge -> variable map.
    std::vector<double> v2c(ne), c2v(ne), acc(n);
    for (uint64_t e = 0; e < ne; ++e) v2c[e] = llr[code.chk_nbr[e]];

    std::vector<double> fwd, bwd;
    BitVec hard(n);
    DecodeResult res;

    for (uint32_t iter = 1; iter <= max_iters; ++iter) {
        // Check update: C2V[e] = 2 atanh((1-2s) prod_{e' != e} tanh(V2C/2)).
        for (uint32_t c = 0; c < code.n_chk; ++c) {
            uint32_t lo = code.chk_off[c], hi = code.chk_off[c + 1];
            uint32_t deg = hi - lo;
            fwd.resize(deg + 1);
            bwd.resize(deg + 1);
            fwd[0] = 1.0;
            for (uint32_t k = 0; k < deg; ++k) {
                double m = std::clamp(v2c[lo + k], -kMsgClamp, kMsgClamp);
                fwd[k + 1] = fwd[k] * std::tanh(0.5 * m);
            }
            bwd[deg] = 1.0;
            for (uint32_t k = deg; k-- > 0;) {
                double m = std::clamp(v2c[lo + k], -kMsgClamp, kMsgClamp);
                bwd[k] = bwd[k + 1] * std::tanh(0.5 * m);
            }
            double sign = target_syndrome.get(c) ? -1.0 : 1.0;
            for (uint32_t k = 0; k < deg; ++k) {
                double p = std::clamp(sign * fwd[k] * bwd[k + 1], -kProdClamp,
                                      kProdClamp);
                c2v[lo + k] = 2.0 * std::atanh(p);
            }
        }

        // Variable update and hard decision.
        std::copy(llr.begin(), llr.end(), acc.begin());
        for (uint64_t e = 0; e < ne; ++e) acc[code.chk_nbr[e]] += c2v[e];
        for (uint32_t v = 0; v < n; ++v) hard.set(v, acc[v] < 0.0);

        res.iters = iter;
        if (code.syndrome(hard) == target_syndrome) {
            res.bits = hard;
            res.converged = true;
            return res;
        }
        if (iter == max_iters) break;

        for (uint64_t e = 0; e < ne; ++e) {
            double m = acc[code.chk_nbr[e]] - c2v[e];
            v2c[e] = std::clamp(m, -kMsgClamp, kMsgClamp);
        }
    }
    return res;
}

}  // namespace qkd::ldpc
