#pragma once

#include <cstdint>

#include "qkd/ldpc/code.hpp"

namespace qkd::ldpc {

// Progressive edge growth. Columns receive degrees from `dist` in
// nondecreasing order; each edge lands on the check that is farthest from
// the column in the current graph (breaking ties toward the lowest check
// degree, then by a seeded rotation).
//
// The distance search is a BFS capped by a node-visit budget so large
// blocks stay tractable; the first two tree levels always complete, which
// rules out 4-cycles whenever the graph is sparse enough to allow it, so
// constructed codes have girth >= 6. Beyond the cap the candidate set is
// "every check not yet reached", an approximation of exact PEG.
//
// pool_size > 0 reserves the last pool_size columns as the rate-adaptation
// pool (degree pool_degree). Each pool column's first edge goes to a
// dedicated owner check; pool columns never touch another column's owner,
// which keeps every subset of pool columns linearly independent in H.
LdpcCode peg_construct(uint32_t block_len, double code_rate,
                       const DegreeDist& dist, uint64_t rng_seed,
                       uint32_t pool_size = 0, uint32_t pool_degree = 4);

}  // namespace qkd::ldpc
