#include "oracles.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace testsup {

using qkd::BitVec;
using qkd::hashing::u128;

BitVec random_bits(qkd::Rng& rng, std::size_t n) {
    BitVec v(n);
    for (std::size_t i = 0; i < n; ++i) v.set(i, rng.next_bool());
    return v;
}

BitVec naive_toeplitz(const BitVec& input, const BitVec& seed, std::size_t l) {
    std::size_t n = input.size();
    if (seed.size() != n + l - 1 && l > 0)
        throw std::invalid_argument("oracle: seed length");
    BitVec out(l);
    for (std::size_t i = 0; i < l; ++i) {
        int acc = 0;
        for (std::size_t j = 0; j < n; ++j)
            acc ^= (seed.get(l - 1 - i + j) & input.get(j));
        out.set(i, acc);
    }
    return out;
}

namespace {

// Polynomials over GF(2) as little-endian limb vectors, one bit per
// coefficient. Enough machinery for multiply, mod, and gcd up to a few
// hundred bits.
using Poly = std::vector<uint64_t>;

int poly_degree(const Poly& p) {
    for (int w = static_cast<int>(p.size()) - 1; w >= 0; --w)
        if (p[w]) return w * 64 + 63 - __builtin_clzll(p[w]);
    return -1;
}

bool poly_bit(const Poly& p, int i) {
    std::size_t w = static_cast<std::size_t>(i) / 64;
    return w < p.size() && ((p[w] >> (i % 64)) & 1);
}

void poly_xor_shifted(Poly& a, const Poly& b, int shift) {
    int wordsh = shift / 64, bitsh = shift % 64;
    std::size_t need = b.size() + wordsh + 1;
    if (a.size() < need) a.resize(need, 0);
    for (std::size_t w = 0; w < b.size(); ++w) {
        a[w + wordsh] ^= b[w] << bitsh;
        if (bitsh && w + wordsh + 1 < a.size()) a[w + wordsh + 1] ^= b[w] >> (64 - bitsh);
    }
}

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly r;
    int db = poly_degree(b);
    for (int i = 0; i <= db; ++i)
        if (poly_bit(b, i)) poly_xor_shifted(r, a, i);
    return r;
}

// a mod m, in place.
void poly_mod(Poly& a, const Poly& m) {
    int dm = poly_degree(m);
    if (dm < 0) throw std::invalid_argument("oracle: zero modulus");
    for (int da = poly_degree(a); da >= dm; da = poly_degree(a))
        poly_xor_shifted(a, m, da - dm);
}

Poly poly_gcd(Poly a, Poly b) {
    while (poly_degree(b) >= 0) {
        poly_mod(a, b);
        std::swap(a, b);
    }
    return a;
}

Poly from_u128(u128 v) {
    return {static_cast<uint64_t>(v), static_cast<uint64_t>(v >> 64)};
}

Poly field_poly(int k, u128 poly_low) {
    Poly f = from_u128(poly_low);
    f.resize(static_cast<std::size_t>(k) / 64 + 1, 0);
    f[static_cast<std::size_t>(k) / 64] |= uint64_t{1} << (k % 64);
    return f;
}

u128 to_u128(const Poly& p) {
    u128 v = p.empty() ? 0 : p[0];
    if (p.size() > 1) v |= static_cast<u128>(p[1]) << 64;
    for (std::size_t w = 2; w < p.size(); ++w)
        if (p[w]) throw std::logic_error("oracle: value exceeds 128 bits");
    return v;
}

}  // namespace

u128 naive_gf2_mul(int k, u128 poly_low, u128 a, u128 b) {
    Poly prod = poly_mul(from_u128(a), from_u128(b));
    Poly f = field_poly(k, poly_low);
    poly_mod(prod, f);
    return to_u128(prod);
}

bool poly_is_irreducible(int k, u128 poly_low) {
    Poly f = field_poly(k, poly_low);
    Poly x = {2};

    // h_i = x^(2^i) mod f by repeated squaring.
    std::vector<Poly> h(static_cast<std::size_t>(k) + 1);
    h[0] = x;
    for (int i = 1; i <= k; ++i) {
        h[i] = poly_mul(h[i - 1], h[i - 1]);
        poly_mod(h[i], f);
    }
    // Rabin: x^(2^k) == x mod f, and for every prime p | k the polynomial
    // x^(2^(k/p)) - x must be coprime with f.
    Poly fix = h[k];
    poly_xor_shifted(fix, x, 0);
    if (poly_degree(fix) >= 0) return false;
    for (int p = 2; p <= k; ++p) {
        if (k % p != 0) continue;
        bool prime = true;
        for (int d = 2; d * d <= p; ++d)
            if (p % d == 0) prime = false;
        if (!prime) continue;
        Poly diff = h[k / p];
        poly_xor_shifted(diff, x, 0);
        if (poly_degree(poly_gcd(f, diff)) != 0) return false;
    }
    return true;
}

u128 naive_poly_eval(const qkd::hashing::Gf2k& field, const std::vector<uint8_t>& msg,
                     std::size_t msg_bits, u128 point) {
    int k = field.k;
    std::vector<u128> blocks;
    for (std::size_t base = 0; base < msg_bits; base += k) {
        u128 b = 0;
        for (std::size_t i = 0; i < static_cast<std::size_t>(k) && base + i < msg_bits; ++i) {
            std::size_t bit = base + i;
            if ((msg[bit / 8] >> (bit % 8)) & 1) b |= u128{1} << i;
        }
        blocks.push_back(b);
    }
    u128 len_block = static_cast<u128>(msg_bits);
    if (k < 64) len_block &= (u128{1} << k) - 1;  // length reduced into the field
    blocks.push_back(len_block);

    // Powers by repeated naive multiplication: power[e] = point^e.
    std::size_t t = blocks.size();
    std::vector<u128> power(t + 1);
    power[0] = 1;
    for (std::size_t e = 1; e <= t; ++e)
        power[e] = naive_gf2_mul(k, field.poly_low, power[e - 1], point);

    u128 acc = 0;
    for (std::size_t i = 0; i < t; ++i)
        acc ^= naive_gf2_mul(k, field.poly_low, blocks[i], power[t - i]);
    return acc;
}

int cycle_girth(const qkd::ldpc::LdpcCode& code) {
    uint32_t nv = code.n_var, nc = code.n_chk;
    uint32_t total = nv + nc;
    // Unified adjacency: variables [0, nv), checks [nv, nv + nc).
    std::vector<std::vector<uint32_t>> adj(total);
    for (uint32_t v = 0; v < nv; ++v)
        for (uint32_t k = code.var_off[v]; k < code.var_off[v + 1]; ++k) {
            uint32_t c = nv + code.var_nbr[k];
            adj[v].push_back(c);
            adj[c].push_back(v);
        }

    int best = 0;
    std::vector<int> dist(total);
    std::vector<uint32_t> parent(total);
    for (uint32_t s = 0; s < nv; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        std::deque<uint32_t> q{s};
        dist[s] = 0;
        parent[s] = s;
        while (!q.empty()) {
            uint32_t u = q.front();
            q.pop_front();
            if (best && 2 * dist[u] >= best) continue;
            for (uint32_t w : adj[u]) {
                if (dist[w] < 0) {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    q.push_back(w);
                } else if (w != parent[u]) {
                    int cyc = dist[u] + dist[w] + 1;
                    if (!best || cyc < best) best = cyc;
                }
            }
        }
    }
    return best;
}

BitVec naive_syndrome(const qkd::ldpc::LdpcCode& code, const BitVec& x) {
    BitVec s(code.n_chk);
    for (uint32_t v = 0; v < code.n_var; ++v) {
        if (!x.get(v)) continue;
        for (uint32_t k = code.var_off[v]; k < code.var_off[v + 1]; ++k)
            s.flip(code.var_nbr[k]);
    }
    return s;
}

}  // namespace testsup
