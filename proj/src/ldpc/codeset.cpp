#include "qkd/ldpc/codeset.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>

#include "qkd/errors.hpp"
#include "qkd/ldpc/peg.hpp"
#include "qkd/ldpc/rate_adapt.hpp"
#include "qkd/log.hpp"
#include "qkd/rng.hpp"

namespace qkd::ldpc {

namespace {

// Degree given to the puncture-pool variables. Higher degrees keep the
// punctured nodes well connected so belief propagation recovers them; 8
// measured noticeably better than 4 at the production block length.
constexpr uint32_t kPoolDegree = 8;

std::mutex g_mu;
std::map<std::string, std::shared_ptr<const LdpcCode>>& cache() {
    static std::map<std::string, std::shared_ptr<const LdpcCode>> c;
    return c;
}

std::string code_name(double rate, uint32_t nb) {
    std::ostringstream os;
    os << "r" << std::setw(4) << std::setfill('0') << std::lround(rate * 1000)
       << "_n" << nb;
    return os.str();
}

}  // namespace

DegreeDist resolve_degree_dist(const std::string& degree_dir, double rate) {
    if (degree_dir.empty()) return builtin_degree_dist(rate);
    std::string manifest = degree_dir + "/rates.txt";
    std::ifstream in(manifest);
    if (!in) throw ConfigError("cannot open " + manifest);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        double r;
        std::string fname;
        if (!(ls >> r >> fname))
            throw ConfigError(manifest + ":" + std::to_string(lineno) + ": expected '<rate> <file>'");
        if (std::abs(r - rate) < 1e-9) return load_degree_dist(degree_dir + "/" + fname);
    }
    std::ostringstream os;
    os << "no degree file for rate " << rate << " in " << manifest;
    throw ConfigError(os.str());
}

std::shared_ptr<const LdpcCode> get_code(const PostParams& post, std::size_t rate_index,
                                         uint32_t payload_n) {
    if (rate_index >= post.code_rates.size())
        throw ConfigError("rate index outside the configured code set");
    double rate = post.code_rates[rate_index];
    uint32_t nb = block_len_for(payload_n, post.adapt_delta);
    uint32_t pool = nb - payload_n;
    std::string name = code_name(rate, nb);
    std::string key = name + "@" + post.degree_dir;

    {
        std::lock_guard<std::mutex> lk(g_mu);
        auto it = cache().find(key);
        if (it != cache().end()) return it->second;
    }

    std::string disk_path;
    if (!post.codeset_dir.empty())
        disk_path = post.codeset_dir + "/" + name + ".alist";

    std::shared_ptr<LdpcCode> code;
    if (!disk_path.empty() && std::filesystem::exists(disk_path)) {
        code = std::make_shared<LdpcCode>(read_alist(disk_path));
        code->pool_size = pool;  // alist carries no pool metadata
        code->code_rate = rate;
        code->validate();
        if (code->n_var != nb)
            throw ConfigError("cached code dimensions disagree with config: " + disk_path);
    } else {
        DegreeDist dist = resolve_degree_dist(post.degree_dir, rate);
        uint64_t seed = hash3_u64(seed_purpose::kLdpc,
                                  static_cast<uint64_t>(std::lround(rate * 1000)), nb);
        log_info("constructing LDPC code ", name);
        code = std::make_shared<LdpcCode>(
            peg_construct(nb, rate, dist, seed, pool, kPoolDegree));
        if (!disk_path.empty()) {
            std::filesystem::create_directories(post.codeset_dir);
            std::string tmp = disk_path + ".tmp";
            write_alist(*code, tmp);
            std::filesystem::rename(tmp, disk_path);
        }
    }

    std::shared_ptr<const LdpcCode> frozen = code;
    std::lock_guard<std::mutex> lk(g_mu);
    auto [it, inserted] = cache().emplace(key, frozen);
    return it->second;
}

}  // namespace qkd::ldpc
