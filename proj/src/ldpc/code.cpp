#include "qkd/ldpc/code.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>

#include "qkd/errors.hpp"
#include "qkd/rng.hpp"

namespace qkd::ldpc {

void DegreeDist::validate() const {
    if (node_fractions.empty()) throw ConfigError("degree distribution is empty");
    double sum = 0.0;
    for (auto [deg, frac] : node_fractions) {
        if (deg < 2) throw ConfigError("variable degrees must be >= 2");
        if (deg > 15) throw ConfigError("variable degrees must be <= 15");
        if (frac <= 0.0 || frac > 1.0)
            throw ConfigError("degree fractions must be in (0,1]");
        sum += frac;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("degree fractions must sum to 1");
    for (size_t i = 1; i < node_fractions.size(); ++i)
        if (node_fractions[i].first <= node_fractions[i - 1].first)
            throw ConfigError("degree list must be strictly increasing");
}

double DegreeDist::avg_degree() const {
    double s = 0.0;
    for (auto [deg, frac] : node_fractions) s += deg * frac;
    return s;
}

std::vector<uint32_t> DegreeDist::realize(uint32_t n_columns) const {
    validate();
    // Largest-remainder apportionment of columns to degrees.
    std::vector<uint32_t> counts(node_fractions.size());
    std::vector<std::pair<double, size_t>> rema;
    uint32_t assigned = 0;
    for (size_t i = 0; i < node_fractions.size(); ++i) {
        double exact = node_fractions[i].second * n_columns;
        counts[i] = static_cast<uint32_t>(exact);
        assigned += counts[i];
        rema.push_back({exact - counts[i], i});
    }
    std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (size_t k = 0; assigned < n_columns; ++k, ++assigned)
        ++counts[rema[k % rema.size()].second];

    std::vector<uint32_t> degrees;
    degrees.reserve(n_columns);
    for (size_t i = 0; i < counts.size(); ++i)
        degrees.insert(degrees.end(), counts[i], node_fractions[i].first);
    return degrees;
}

DegreeDist load_degree_dist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open degree file: " + path);
    DegreeDist d;
    std::string line;
    while (std::getline(in, line)) {
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream is(line);
        uint32_t deg;
        double frac;
        if (is >> deg >> frac) d.node_fractions.push_back({deg, frac});
    }
    std::sort(d.node_fractions.begin(), d.node_fractions.end());
    d.validate();
    return d;
}

std::vector<double> builtin_rates() { return {0.65, 0.70, 0.75, 0.80, 0.85, 0.90}; }

DegreeDist builtin_degree_dist(double rate) {
    // Default family: a degree-2 slice scaled with the redundancy, a bulk of
    // degree 3, and two heavier slices that speed up convergence. Tuned
    // empirically against the reconciliation targets; replaceable via
    // degree_dir for users with their own optimized ensembles.
    for (double r : builtin_rates()) {
        if (std::abs(r - rate) < 1e-9) {
            double f2 = 0.45 * (1.0 - r);
            double f8 = 0.12;
            double f15 = 0.06;
            double f3 = 1.0 - f2 - f8 - f15;
            DegreeDist d;
            d.node_fractions = {{2, f2}, {3, f3}, {8, f8}, {15, f15}};
            d.validate();
            return d;
        }
    }
    throw ConfigError("no built-in degree distribution for rate " +
                      std::to_string(rate));
}

BitVec LdpcCode::syndrome(const BitVec& x) const {
    if (x.size() != n_var)
        throw ProtocolError("syndrome input length mismatch");
    BitVec s(n_chk);
    for (uint32_t c = 0; c < n_chk; ++c) {
        int acc = 0;
        for (uint32_t k = chk_off[c]; k < chk_off[c + 1]; ++k)
            acc ^= x.get(chk_nbr[k]);
        if (acc) s.set(c, 1);
    }
    return s;
}

void LdpcCode::rebuild_check_side() {
    std::vector<uint32_t> deg(n_chk, 0);
    for (uint32_t c : var_nbr) ++deg[c];
    chk_off.assign(n_chk + 1, 0);
    for (uint32_t c = 0; c < n_chk; ++c) chk_off[c + 1] = chk_off[c] + deg[c];
    chk_nbr.assign(var_nbr.size(), 0);
    std::vector<uint32_t> cursor(chk_off.begin(), chk_off.end() - 1);
    for (uint32_t v = 0; v < n_var; ++v)
        for (uint32_t k = var_off[v]; k < var_off[v + 1]; ++k)
            chk_nbr[cursor[var_nbr[k]]++] = v;
}

void LdpcCode::validate() const {
    if (n_var == 0 || n_chk == 0) throw ConfigError("empty code");
    if (var_off.size() != n_var + 1 || chk_off.size() != n_chk + 1)
        throw ConfigError("bad adjacency offsets");
    if (var_nbr.size() != chk_nbr.size())
        throw ConfigError("adjacency views disagree on edge count");
    double nominal = 1.0 - static_cast<double>(n_chk) / n_var;
    if (std::abs(nominal - code_rate) > 1.0 / n_var + 1e-9)
        throw ConfigError("code_rate inconsistent with dimensions");
    for (uint32_t v = 0; v < n_var; ++v) {
        if (var_degree(v) < 2) throw ConfigError("variable degree below 2");
        for (uint32_t k = var_off[v] + 1; k < var_off[v + 1]; ++k)
            if (var_nbr[k] == var_nbr[k - 1])
                throw ConfigError("duplicate edge in column");
    }

    // Connectivity over the bipartite graph.
    std::vector<char> vseen(n_var, 0), cseen(n_chk, 0);
    std::queue<uint32_t> q;  // vars as v, checks as n_var + c
    q.push(0);
    vseen[0] = 1;
    uint64_t seen = 1;
    while (!q.empty()) {
        uint32_t node = q.front();
        q.pop();
        if (node < n_var) {
            for (uint32_t k = var_off[node]; k < var_off[node + 1]; ++k) {
                uint32_t c = var_nbr[k];
                if (!cseen[c]) {
                    cseen[c] = 1;
                    ++seen;
                    q.push(n_var + c);
                }
            }
        } else {
            uint32_t c = node - n_var;
            for (uint32_t k = chk_off[c]; k < chk_off[c + 1]; ++k) {
                uint32_t v = chk_nbr[k];
                if (!vseen[v]) {
                    vseen[v] = 1;
                    ++seen;
                    q.push(v);
                }
            }
        }
    }
    if (seen != static_cast<uint64_t>(n_var) + n_chk)
        throw ConfigError("parity graph is not connected");
}

void write_alist(const LdpcCode& code, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    uint32_t max_dv = 0, max_dc = 0;
    for (uint32_t v = 0; v < code.n_var; ++v)
        max_dv = std::max(max_dv, code.var_degree(v));
    for (uint32_t c = 0; c < code.n_chk; ++c)
        max_dc = std::max(max_dc, code.chk_degree(c));

    out << code.n_var << ' ' << code.n_chk << '\n';
    out << max_dv << ' ' << max_dc << '\n';
    for (uint32_t v = 0; v < code.n_var; ++v)
        out << code.var_degree(v) << (v + 1 == code.n_var ? '\n' : ' ');
    for (uint32_t c = 0; c < code.n_chk; ++c)
        out << code.chk_degree(c) << (c + 1 == code.n_chk ? '\n' : ' ');
    for (uint32_t v = 0; v < code.n_var; ++v) {
        for (uint32_t k = 0; k < max_dv; ++k) {
            uint32_t val = k < code.var_degree(v)
                               ? code.var_nbr[code.var_off[v] + k] + 1
                               : 0;
            out << val << (k + 1 == max_dv ? '\n' : ' ');
        }
    }
    for (uint32_t c = 0; c < code.n_chk; ++c) {
        for (uint32_t k = 0; k < max_dc; ++k) {
            uint32_t val = k < code.chk_degree(c)
                               ? code.chk_nbr[code.chk_off[c] + k] + 1
                               : 0;
            out << val << (k + 1 == max_dc ? '\n' : ' ');
        }
    }
}

LdpcCode read_alist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open alist file: " + path);
    auto next = [&in, &path]() {
        long long v;
        if (!(in >> v) || v < 0) throw ConfigError("malformed alist: " + path);
        return static_cast<uint64_t>(v);
    };

    LdpcCode code;
    code.n_var = static_cast<uint32_t>(next());
    code.n_chk = static_cast<uint32_t>(next());
    if (code.n_var == 0 || code.n_chk == 0 || code.n_chk >= code.n_var)
        throw ConfigError("bad alist dimensions: " + path);
    uint32_t max_dv = static_cast<uint32_t>(next());
    uint32_t max_dc = static_cast<uint32_t>(next());

    std::vector<uint32_t> dv(code.n_var), dc(code.n_chk);
    for (auto& d : dv) d = static_cast<uint32_t>(next());
    for (auto& d : dc) d = static_cast<uint32_t>(next());

    code.var_off.assign(code.n_var + 1, 0);
    for (uint32_t v = 0; v < code.n_var; ++v)
        code.var_off[v + 1] = code.var_off[v] + dv[v];
    code.var_nbr.assign(code.var_off.back(), 0);
    for (uint32_t v = 0; v < code.n_var; ++v) {
        for (uint32_t k = 0; k < max_dv; ++k) {
            uint64_t val = next();
            if (k < dv[v]) {
                if (val == 0 || val > code.n_chk)
                    throw ConfigError("alist check index out of range: " + path);
                code.var_nbr[code.var_off[v] + k] = static_cast<uint32_t>(val - 1);
            } else if (val != 0) {
                throw ConfigError("alist padding must be zero: " + path);
            }
        }
        std::sort(code.var_nbr.begin() + code.var_off[v],
                  code.var_nbr.begin() + code.var_off[v + 1]);
    }
    // The check-side lists are redundant; skip them but verify the counts.
    uint64_t edge_check = 0;
    for (uint32_t c = 0; c < code.n_chk; ++c) {
        for (uint32_t k = 0; k < max_dc; ++k) {
            uint64_t val = next();
            if (k < dc[c]) {
                if (val == 0 || val > code.n_var)
                    throw ConfigError("alist var index out of range: " + path);
                ++edge_check;
            } else if (val != 0) {
                throw ConfigError("alist padding must be zero: " + path);
            }
        }
    }
    if (edge_check != code.var_nbr.size())
        throw ConfigError("alist edge counts disagree: " + path);

    code.code_rate = 1.0 - static_cast<double>(code.n_chk) / code.n_var;
    code.rebuild_check_side();
    return code;
}

int measure_girth(const LdpcCode& code, uint32_t sample, uint64_t seed) {
    // BFS from each start column; the first revisit of the start through a
    // distinct branch closes a shortest cycle through it. Girth through a
    // column equals the minimum over its BFS; sampling columns gives an
    // upper bound on the graph girth (exact when all columns are visited).
    uint32_t count = (sample == 0 || sample >= code.n_var) ? code.n_var : sample;
    Rng rng(seed);
    std::vector<int> vdist(code.n_var), cdist(code.n_chk);
    int best = 0;

    for (uint32_t s = 0; s < count; ++s) {
        uint32_t start = (count == code.n_var)
                             ? s
                             : static_cast<uint32_t>(rng.next_below(code.n_var));
        std::fill(vdist.begin(), vdist.end(), -1);
        std::fill(cdist.begin(), cdist.end(), -1);
        // Track the depth-0 branch (which edge from the start) each node was
        // reached through; meeting nodes from different branches closes a
        // cycle through the start.
        std::vector<int> vbranch(code.n_var, -1), cbranch(code.n_chk, -1);
        std::queue<uint32_t> q;  // checks as c, vars as n_chk + v
        vdist[start] = 0;
        int local_best = 0;
        auto meet = [&local_best](int len) {
            if (!local_best || len < local_best) local_best = len;
        };
        for (uint32_t k = code.var_off[start]; k < code.var_off[start + 1]; ++k) {
            uint32_t c = code.var_nbr[k];
            cdist[c] = 1;
            cbranch[c] = static_cast<int>(k - code.var_off[start]);
            q.push(c);
        }
        // A cycle through the start corresponds to two BFS branches meeting;
        // take the minimum over every meeting edge seen.
        while (!q.empty()) {
            uint32_t node = q.front();
            q.pop();
            if (node < code.n_chk) {
                uint32_t c = node;
                if (local_best && 2 * cdist[c] >= local_best) continue;
                for (uint32_t k = code.chk_off[c]; k < code.chk_off[c + 1]; ++k) {
                    uint32_t v = code.chk_nbr[k];
                    if (v == start) continue;
                    if (vdist[v] < 0) {
                        vdist[v] = cdist[c] + 1;
                        vbranch[v] = cbranch[c];
                        q.push(code.n_chk + v);
                    } else if (vbranch[v] != cbranch[c]) {
                        meet(vdist[v] + cdist[c] + 1);
                    }
                }
            } else {
                uint32_t v = node - code.n_chk;
                if (local_best && 2 * vdist[v] >= local_best) continue;
                for (uint32_t k = code.var_off[v]; k < code.var_off[v + 1]; ++k) {
                    uint32_t c = code.var_nbr[k];
                    if (cdist[c] < 0) {
                        cdist[c] = vdist[v] + 1;
                        cbranch[c] = vbranch[v];
                        q.push(c);
                    } else if (cbranch[c] != vbranch[v]) {
                        meet(cdist[c] + vdist[v] + 1);
                    }
                }
            }
        }
        if (local_best && (best == 0 || local_best < best)) best = local_best;
        if (best == 4) break;  // cannot get shorter in a simple bipartite graph
    }
    return best;
}

}  // namespace qkd::ldpc
