#include "qkd/ldpc/peg.hpp"

#include <algorithm>
#include <cmath>

#include "qkd/errors.hpp"
#include "qkd/rng.hpp"

namespace qkd::ldpc {

namespace {

struct Builder {
    uint32_t n, m;
    std::vector<std::vector<uint32_t>> var_adj, chk_adj;
    std::vector<uint32_t> chk_deg;
    std::vector<int32_t> owner_of;  // check -> pool index or -1

    // Checks grouped by current degree; entries go stale when a check gains
    // an edge and are dropped lazily during scans.
    std::vector<std::vector<uint32_t>> buckets;
    uint32_t min_deg = 0;

    // BFS scratch, epoch-stamped.
    std::vector<uint32_t> vmark, cmark;
    uint32_t epoch = 0;
    std::vector<uint32_t> frontier, next_new, scratch_vars;

    uint64_t visit_budget;
    Rng rng;

    Builder(uint32_t n_, uint32_t m_, uint64_t seed, uint64_t budget)
        : n(n_), m(m_), var_adj(n_), chk_adj(m_), chk_deg(m_, 0),
          owner_of(m_, -1), buckets(1), vmark(n_, 0), cmark(m_, 0),
          visit_budget(budget), rng(seed) {
        buckets[0].reserve(m_);
        for (uint32_t c = 0; c < m_; ++c) buckets[0].push_back(c);
    }

    void add_edge(uint32_t v, uint32_t c) {
        var_adj[v].push_back(c);
        chk_adj[c].push_back(v);
        uint32_t d = ++chk_deg[c];
        if (buckets.size() <= d) buckets.resize(d + 1);
        buckets[d].push_back(c);
    }

    bool excluded(uint32_t c, bool v_is_pool, int32_t own_pool_idx) const {
        if (!v_is_pool) return false;
        return owner_of[c] >= 0 && owner_of[c] != own_pool_idx;
    }

    // Lowest-degree check satisfying pred, scanning each bucket from a
    // seeded rotation so ties spread out. Returns m when none qualifies.
    template <class Pred>
    uint32_t min_degree_check(Pred pred) {
        for (uint32_t d = min_deg; d < buckets.size(); ++d) {
            auto& b = buckets[d];
            // Drop stale entries (degree moved on) in place.
            size_t w = 0;
            for (size_t i = 0; i < b.size(); ++i)
                if (chk_deg[b[i]] == d) b[w++] = b[i];
            b.resize(w);
            if (d == min_deg && b.empty() && min_deg + 1 < buckets.size())
                ++min_deg;
            if (b.empty()) continue;
            size_t start = rng.next_below(b.size());
            for (size_t i = 0; i < b.size(); ++i) {
                uint32_t c = b[(start + i) % b.size()];
                if (pred(c)) return c;
            }
        }
        return m;
    }

    // Expands the BFS tree rooted at v. On return, cmark-stamped checks are
    // the reached set; `next_new` holds the checks first reached on the
    // deepest completed level. Returns true when every check was reached.
    bool grow_tree(uint32_t v) {
        ++epoch;
        vmark[v] = epoch;
        frontier.clear();
        uint64_t reached = 0, visits = 0;
        for (uint32_t c : var_adj[v]) {
            cmark[c] = epoch;
            frontier.push_back(c);
            ++reached;
        }
        next_new = frontier;
        uint32_t level = 0;
        while (!frontier.empty()) {
            // Levels 0 and 1 always complete: connecting to a check not yet
            // reached after level 1 cannot close a 4-cycle.
            if (level >= 2 && visits > visit_budget) return false;
            if (reached == m) return true;
            ++level;
            scratch_vars.clear();
            for (uint32_t c : frontier) {
                for (uint32_t w : chk_adj[c]) {
                    if (vmark[w] == epoch) continue;
                    vmark[w] = epoch;
                    scratch_vars.push_back(w);
                    ++visits;
                }
            }
            next_new.clear();
            for (uint32_t w : scratch_vars) {
                for (uint32_t c2 : var_adj[w]) {
                    if (cmark[c2] == epoch) continue;
                    cmark[c2] = epoch;
                    next_new.push_back(c2);
                    ++reached;
                    ++visits;
                }
            }
            if (next_new.empty()) return reached == m;
            frontier = next_new;
        }
        return reached == m;
    }

    uint32_t place_edge(uint32_t v, bool is_pool, int32_t pool_idx) {
        if (var_adj[v].empty()) {
            uint32_t c = min_degree_check([&](uint32_t cc) {
                return !excluded(cc, is_pool, pool_idx);
            });
            if (c == m) throw ConfigError("peg: no usable check for first edge");
            return c;
        }
        bool all_reached = grow_tree(v);
        if (!all_reached) {
            uint32_t c = min_degree_check([&](uint32_t cc) {
                return cmark[cc] != epoch && !excluded(cc, is_pool, pool_idx);
            });
            if (c != m) return c;
            // Everything unreached is excluded; fall through to the deepest
            // reached level.
        }
        // Saturated tree: choose among the deepest level's checks.
        uint32_t best = m;
        uint32_t best_deg = 0;
        size_t start = next_new.empty() ? 0 : rng.next_below(next_new.size());
        for (size_t i = 0; i < next_new.size(); ++i) {
            uint32_t c = next_new[(start + i) % next_new.size()];
            if (excluded(c, is_pool, pool_idx)) continue;
            bool adjacent = std::find(var_adj[v].begin(), var_adj[v].end(), c) !=
                            var_adj[v].end();
            if (adjacent) continue;
            if (best == m || chk_deg[c] < best_deg) {
                best = c;
                best_deg = chk_deg[c];
            }
        }
        if (best != m) return best;
        // Last resort: any non-adjacent, non-excluded check.
        uint32_t c = min_degree_check([&](uint32_t cc) {
            if (excluded(cc, is_pool, pool_idx)) return false;
            return std::find(var_adj[v].begin(), var_adj[v].end(), cc) ==
                   var_adj[v].end();
        });
        if (c == m) throw ConfigError("peg: variable degree exceeds usable checks");
        return c;
    }
};

}  // namespace

LdpcCode peg_construct(uint32_t block_len, double code_rate,
                       const DegreeDist& dist, uint64_t rng_seed,
                       uint32_t pool_size, uint32_t pool_degree) {
    if (block_len < 100) throw ConfigError("block_len must be >= 100");
    if (code_rate <= 0.0 || code_rate >= 1.0)
        throw ConfigError("code_rate must be in (0,1)");
    uint32_t m = static_cast<uint32_t>(std::lround((1.0 - code_rate) * block_len));
    if (m < 2 || m >= block_len) throw ConfigError("degenerate check count");
    if (pool_size > m / 2)
        throw ConfigError("adaptation pool larger than half the checks");
    if (pool_size > 0 && (pool_degree < 2 || pool_degree > 15))
        throw ConfigError("pool_degree must be in [2,15]");

    uint32_t payload = block_len - pool_size;
    std::vector<uint32_t> degrees = dist.realize(payload);
    uint32_t max_dv = degrees.back();
    if (std::max(max_dv, pool_degree) > m)
        throw ConfigError("degree distribution infeasible for this check count");

    // Visit budget: enough to always finish BFS level 1 (see grow_tree),
    // estimated from the average check degree this code will end at.
    double avg_dc = (dist.avg_degree() * payload + double(pool_degree) * pool_size) / m;
    uint64_t budget = std::max<uint64_t>(
        8000, static_cast<uint64_t>(2.0 * max_dv * (avg_dc + 4) * (max_dv + 1)));

    Builder b(block_len, m, rng_seed, budget);
    for (uint32_t i = 0; i < pool_size; ++i) {
        uint32_t c = static_cast<uint32_t>(
            (static_cast<uint64_t>(i) * m) / pool_size);
        b.owner_of[c] = static_cast<int32_t>(i);
    }

    for (uint32_t v = 0; v < payload; ++v)
        for (uint32_t e = 0; e < degrees[v]; ++e)
            b.add_edge(v, b.place_edge(v, false, -1));

    for (uint32_t i = 0; i < pool_size; ++i) {
        uint32_t v = payload + i;
        for (uint32_t e = 0; e < pool_degree; ++e) {
            uint32_t c;
            if (e == 0) {
                c = static_cast<uint32_t>((static_cast<uint64_t>(i) * m) / pool_size);
            } else {
                c = b.place_edge(v, true, static_cast<int32_t>(i));
            }
            b.add_edge(v, c);
        }
    }

    LdpcCode code;
    code.n_var = block_len;
    code.n_chk = m;
    code.code_rate = code_rate;
    code.pool_size = pool_size;
    code.var_off.assign(block_len + 1, 0);
    for (uint32_t v = 0; v < block_len; ++v) {
        std::sort(b.var_adj[v].begin(), b.var_adj[v].end());
        code.var_off[v + 1] = code.var_off[v] + b.var_adj[v].size();
    }
    code.var_nbr.reserve(code.var_off.back());
    for (uint32_t v = 0; v < block_len; ++v)
        code.var_nbr.insert(code.var_nbr.end(), b.var_adj[v].begin(),
                            b.var_adj[v].end());
    code.rebuild_check_side();
    if (block_len <= 4096) code.girth = measure_girth(code);
    code.validate();
    return code;
}

}  // namespace qkd::ldpc
