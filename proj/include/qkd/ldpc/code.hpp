#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qkd/bitvec.hpp"

namespace qkd::ldpc {

// Variable-node degree distribution, node perspective: fraction of columns
// holding each degree. Fractions sum to 1.
struct DegreeDist {
    std::vector<std::pair<uint32_t, double>> node_fractions;

    void validate() const;
    double avg_degree() const;
    // Integer column counts for a given block, largest-remainder rounding.
    std::vector<uint32_t> realize(uint32_t n_columns) const;
};

DegreeDist load_degree_dist(const std::string& path);
// Default family shipped with the library; `rate` must be one of the
// supported base rates.
DegreeDist builtin_degree_dist(double rate);
std::vector<double> builtin_rates();

// Sparse parity-check code, compressed adjacency in both directions.
// Columns [n_var - pool_size, n_var) form the rate-adaptation pool; by
// construction each pool column owns one check that touches no other pool
// column, which keeps any punctured subset of the pool linearly
// independent (so every punctured column buys back exactly one bit of
// syndrome leakage).
struct LdpcCode {
    uint32_t n_var = 0;
    uint32_t n_chk = 0;
    double code_rate = 0.0;  // nominal 1 - n_chk/n_var
    uint32_t pool_size = 0;

    std::vector<uint32_t> var_off, var_nbr;  // column -> rows
    std::vector<uint32_t> chk_off, chk_nbr;  // row -> columns

    int girth = 0;  // measured lower bound, 0 = not measured

    uint32_t var_degree(uint32_t v) const { return var_off[v + 1] - var_off[v]; }
    uint32_t chk_degree(uint32_t c) const { return chk_off[c + 1] - chk_off[c]; }
    uint64_t edges() const { return var_nbr.size(); }
    uint32_t payload_len() const { return n_var - pool_size; }

    BitVec syndrome(const BitVec& x) const;

    // Rebuilds the check-side adjacency from the variable side.
    void rebuild_check_side();
    // Degree floor, consistency of the two adjacency views, connectivity.
    void validate() const;
};

// Standard alist text serialization (1-based indices, zero padding).
void write_alist(const LdpcCode& code, const std::string& path);
LdpcCode read_alist(const std::string& path);

// Shortest cycle through any of `sample` distinct start columns (all
// columns when sample >= n_var). Returns 0 if no cycle was found.
int measure_girth(const LdpcCode& code, uint32_t sample = 0, uint64_t seed = 1);

}  // namespace qkd::ldpc
