#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "qkd/bitvec.hpp"
#include "qkd/csv.hpp"
#include "qkd/errors.hpp"
#include "qkd/params.hpp"
#include "qkd/records.hpp"
#include "qkd/rng.hpp"
#include "support/oracles.hpp"

using namespace qkd;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    auto d = fs::temp_directory_path() / "qkd_test_util";
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("bitvec set get flip") {
    BitVec v(130);
    CHECK(v.size() == 130);
    for (std::size_t i = 0; i < 130; ++i) CHECK(v.get(i) == false);
    v.set(0, true);
    v.set(63, true);
    v.set(64, true);
    v.set(129, true);
    CHECK(v.popcount() == 4);
    v.flip(64);
    CHECK(v.get(64) == false);
    v.set(63, false);
    CHECK(v.popcount() == 2);
}

TEST_CASE("bitvec push_back grows word by word") {
    BitVec v;
    for (int i = 0; i < 200; ++i) v.push_back(i % 3 == 0);
    CHECK(v.size() == 200);
    for (int i = 0; i < 200; ++i) CHECK(v.get(i) == (i % 3 == 0));
}

TEST_CASE("bitvec xor popcount equality") {
    Rng rng(11);
    BitVec a = testsup::random_bits(rng, 400);
    BitVec b = testsup::random_bits(rng, 400);
    BitVec c = a;
    c ^= b;
    std::size_t diff = 0;
    for (std::size_t i = 0; i < 400; ++i)
        if (a.get(i) != b.get(i)) ++diff;
    CHECK(c.popcount() == diff);
    c ^= b;
    CHECK(c == a);
    CHECK_FALSE(c != a);
}

TEST_CASE("bitvec slice append recompose") {
    Rng rng(12);
    BitVec a = testsup::random_bits(rng, 300);
    BitVec head = a.slice(0, 97);
    BitVec tail = a.slice(97, 203);
    CHECK(head.size() == 97);
    CHECK(tail.size() == 203);
    BitVec joined = head;
    joined.append(tail);
    CHECK(joined == a);
    CHECK(a.slice(127, 0).size() == 0);
}

TEST_CASE("bitvec byte serialization lsb first") {
    BitVec v(10);
    v.set(0, 1);
    v.set(3, 1);
    v.set(9, 1);
    auto bytes = v.to_bytes();
    REQUIRE(bytes.size() == 2);
    CHECK(bytes[0] == 0x09);  // bits 0 and 3
    CHECK(bytes[1] == 0x02);  // bit 9
    CHECK(BitVec::from_bytes(bytes, 10) == v);

    Rng rng(13);
    for (std::size_t n : {1u, 7u, 8u, 65u, 256u, 301u}) {
        BitVec r = testsup::random_bits(rng, n);
        CHECK(BitVec::from_bytes(r.to_bytes(), n) == r);
    }
}

TEST_CASE("bitvec string round trip") {
    BitVec v = BitVec::parse("0110100001");
    CHECK(v.size() == 10);
    CHECK(v.to_string() == "0110100001");
    CHECK(v.get(1));
    CHECK_FALSE(v.get(0));
    CHECK(BitVec::parse(v.to_string()) == v);
}

TEST_CASE("bitvec word accessor is bounds safe") {
    BitVec v(65);
    v.set(64, 1);
    CHECK(v.word(1) == 1);
    CHECK(v.word(2) == 0);
    CHECK(v.word(100) == 0);
}

TEST_CASE("rng streams are deterministic and independent") {
    CHECK(hash3_u64(1, 2, 3) == hash3_u64(1, 2, 3));
    CHECK(hash3_u64(1, 2, 3) != hash3_u64(1, 2, 4));
    CHECK(hash3_u64(1, 2, 3) != hash3_u64(1, 3, 3));
    CHECK(hash3_u64(1, 2, 3) != hash3_u64(2, 2, 3));

    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("rng unit doubles stay in range") {
    Rng rng(7);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double u = rng.next_unit();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    // Mean of n uniforms: sigma = 1/sqrt(12n), allow 5 sigma.
    CHECK(std::abs(sum / n - 0.5) < 5.0 / std::sqrt(12.0 * n));
}

TEST_CASE("rng next_below stays below and covers") {
    Rng rng(9);
    std::vector<int> seen(10, 0);
    for (int i = 0; i < 10000; ++i) {
        uint64_t v = rng.next_below(10);
        REQUIRE(v < 10);
        ++seen[v];
    }
    for (int c : seen) CHECK(c > 800);  // expectation 1000
}

TEST_CASE("rng geometric skip matches expectation") {
    Rng rng(21);
    double p = 0.01;
    const int n = 20000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(rng.next_geometric_skip(p));
    double mean = sum / n;
    double expect = (1.0 - p) / p;
    // std of the mean ~ sqrt((1-p))/p/sqrt(n) ~ 0.70
    CHECK(std::abs(mean - expect) < 5.0);
    CHECK(rng.next_geometric_skip(1.0) == 0);
    CHECK(rng.next_geometric_skip(0.0) == UINT64_MAX);
}

TEST_CASE("rng gaussian moments") {
    Rng rng(33);
    const int n = 200000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double g = rng.next_gaussian();
        s1 += g;
        s2 += g * g;
    }
    CHECK(std::abs(s1 / n) < 0.02);
    CHECK(std::abs(s2 / n - 1.0) < 0.03);
}

TEST_CASE("record files round trip") {
    auto dir = temp_dir();
    std::vector<PulseRecord> pulses = {
        {0, Basis::Z, 1, 1, 0.0},
        {7, Basis::X, 0, 2, 7.0 / 72.6e6},
        {12345678901234ull, Basis::X, 1, 1, 0.5},
    };
    auto ppath = (dir / "pulses.rec").string();
    save_pulse_records(ppath, pulses);
    auto rp = load_pulse_records(ppath);
    REQUIRE(rp.size() == pulses.size());
    for (size_t i = 0; i < pulses.size(); ++i) {
        CHECK(rp[i].pulse_index == pulses[i].pulse_index);
        CHECK(rp[i].basis == pulses[i].basis);
        CHECK(rp[i].bit == pulses[i].bit);
        CHECK(rp[i].photon_count == pulses[i].photon_count);
        CHECK(rp[i].timestamp == pulses[i].timestamp);
    }

    std::vector<ClickRecord> clicks = {
        {3, 2, false, 3.1e-8},
        {kNoPulse, 1, true, 4.0e-8},
    };
    auto cpath = (dir / "clicks.rec").string();
    save_click_records(cpath, clicks);
    auto rc = load_click_records(cpath);
    REQUIRE(rc.size() == 2);
    CHECK(rc[0].pulse_index == 3);
    CHECK(rc[0].detector == 2);
    CHECK_FALSE(rc[0].is_dark);
    CHECK(rc[1].pulse_index == kNoPulse);
    CHECK(rc[1].is_dark);
    CHECK(fs::file_size(cpath) == 2 * kRecordBytes);
}

TEST_CASE("detector layout maps both ways") {
    for (uint8_t det = 0; det < 4; ++det) {
        Basis b = basis_of_detector(det);
        uint8_t bit = bit_of_detector(det);
        CHECK(detector_of(b, bit) == det);
    }
    CHECK(basis_of_detector(0) == Basis::Z);
    CHECK(basis_of_detector(3) == Basis::X);
}

TEST_CASE("csv round trip with schema") {
    auto path = (temp_dir() / "t.csv").string();
    {
        CsvWriter w(path, "unit-test", 2, {"a", "b"});
        w.row({"1", "x,y"});
        w.row({"2", "line\"quote"});
    }
    CsvReader r(path, "unit-test", 2, {"a", "b"});
    std::vector<std::string> cells;
    REQUIRE(r.next(cells));
    CHECK(cells[0] == "1");
    CHECK(cells[1] == "x,y");
    REQUIRE(r.next(cells));
    CHECK(cells[1] == "line\"quote");
    CHECK_FALSE(r.next(cells));
}

TEST_CASE("csv rejects wrong schema or columns") {
    auto path = (temp_dir() / "t2.csv").string();
    { CsvWriter w(path, "unit-test", 1, {"a"}); }
    CHECK_THROWS_AS(CsvReader(path, "unit-test", 2, {"a"}), ConfigError);
    CHECK_THROWS_AS(CsvReader(path, "other", 1, {"a"}), ConfigError);
    CHECK_THROWS_AS(CsvReader(path, "unit-test", 1, {"b"}), ConfigError);
}

TEST_CASE("csv_num keeps integers clean") {
    CHECK(csv_num(3.0) == "3");
    CHECK(csv_num(0.0) == "0");
    double v = 0.07046171331864454;
    CHECK(std::stod(csv_num(v)) == doctest::Approx(v).epsilon(1e-12));
}

TEST_CASE("default config validates and derives efficiencies") {
    ExperimentConfig cfg;
    cfg.validate();
    CHECK(cfg.sim.eta_source_cband == doctest::Approx(0.165 * 0.71 * 0.50));
    CHECK(cfg.sim.eta_channel == doctest::Approx(std::pow(10.0, -0.96)));
    CHECK(cfg.post.m() == 20000);
    CHECK(cfg.sim.eta_emit() == doctest::Approx(cfg.sim.eta_source_cband * 0.55));
}

TEST_CASE("config dump parse round trip is stable") {
    ExperimentConfig cfg;
    cfg.seed = 77;
    cfg.sim.channel_loss_db = 12.0;
    cfg.post.frame_n = 50000;
    cfg.validate();
    std::string dump = dump_config(cfg);

    std::map<std::string, std::string> kv;
    std::istringstream is(dump);
    std::string line;
    while (std::getline(is, line)) {
        auto eq = line.find('=');
        if (line.empty() || line[0] == '#' || eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t") + 1);
            return s;
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    ExperimentConfig back = parse_config(kv);
    CHECK(dump_config(back) == dump);
    CHECK(back.config_hash() == cfg.config_hash());
}

TEST_CASE("config hash tracks every effective parameter") {
    ExperimentConfig a, b;
    a.validate();
    b.validate();
    CHECK(a.config_hash() == b.config_hash());
    b.post.target_efficiency += 0.01;
    CHECK(a.config_hash() != b.config_hash());
    ExperimentConfig c;
    c.seed = 2;
    c.validate();
    CHECK(a.config_hash() != c.config_hash());
}

TEST_CASE("config file rejects junk") {
    auto dir = temp_dir();
    auto write = [&](const std::string& name, const std::string& body) {
        auto p = (dir / name).string();
        std::ofstream(p) << body;
        return p;
    };
    CHECK_THROWS_AS(load_config((dir / "missing.cfg").string()), ConfigError);
    CHECK_THROWS_AS(load_config(write("unknown.cfg", "no_such_key = 1\n")), ConfigError);
    CHECK_THROWS_AS(load_config(write("dup.cfg", "seed = 1\nseed = 2\n")), ConfigError);
    CHECK_THROWS_AS(load_config(write("noval.cfg", "seed\n")), ConfigError);
    CHECK_THROWS_AS(load_config(write("badnum.cfg", "basis_ratio = fast\n")), ConfigError);
    CHECK_THROWS_AS(load_config(write("range.cfg", "basis_ratio = 1.5\n")), ConfigError);
    CHECK_THROWS_AS(
        load_config(write("incons.cfg", "channel_loss_db = 9.6\neta_channel = 0.5\n")),
        ConfigError);

    auto ok = load_config(write("ok.cfg",
                                "# comment\n"
                                "seed = 5\n"
                                "channel_loss_db = 3\n"
                                "frame_n = 10000\n"));
    CHECK(ok.seed == 5);
    CHECK(ok.post.frame_n == 10000);
    CHECK(ok.sim.eta_channel == doctest::Approx(std::pow(10.0, -0.3)));
}

TEST_CASE("post params validation") {
    PostParams p;
    CHECK_NOTHROW(p.validate());
    PostParams bad = p;
    bad.sample_fraction = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = p;
    bad.code_rates = {0.70, 0.65};  // must be ascending
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = p;
    bad.target_efficiency = 0.99;  // below Shannon
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("seed derivation separates purposes") {
    uint64_t master = 1234;
    CHECK(derive_seed(master, seed_purpose::kAliceBits) !=
          derive_seed(master, seed_purpose::kChannel));
    CHECK(derive_seed(master, seed_purpose::kAliceBits) ==
          derive_seed(master, seed_purpose::kAliceBits));
    CHECK(derive_seed(master, seed_purpose::kAliceBits) !=
          derive_seed(master + 1, seed_purpose::kAliceBits));
}
