#pragma once

#include <memory>
#include <string>

#include "qkd/ldpc/code.hpp"
#include "qkd/params.hpp"

namespace qkd::ldpc {

// Degree family for a base rate: the built-in family when degree_dir is
// empty, otherwise the file listed in the directory's rates.txt manifest
// (lines of "<rate> <filename>", '#' comments allowed).
DegreeDist resolve_degree_dist(const std::string& degree_dir, double rate);

// Construction entry shared by the protocol endpoints and the benchmarks.
// The PEG seed depends only on (rate, block length), so every session and
// every test sees the same matrix. Codes are cached in-process; when
// post.codeset_dir is set they are also cached on disk as alist files,
// which makes repeated large-block runs start instantly.
std::shared_ptr<const LdpcCode> get_code(const PostParams& post, std::size_t rate_index,
                                         uint32_t payload_n);

}  // namespace qkd::ldpc
