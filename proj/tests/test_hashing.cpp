#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <stdexcept>
#include <vector>

#include "qkd/hashing/gf2k.hpp"
#include "qkd/hashing/ledger.hpp"
#include "qkd/hashing/poly_hash.hpp"
#include "qkd/hashing/toeplitz.hpp"
#include "qkd/rng.hpp"
#include "support/oracles.hpp"

using namespace qkd;
using namespace qkd::hashing;
using testsup::random_bits;

namespace {

u128 random_u128(Rng& rng) {
    return (static_cast<u128>(rng.next_u64()) << 64) | rng.next_u64();
}

std::vector<uint8_t> random_bytes(Rng& rng, std::size_t n) {
    std::vector<uint8_t> v(n);
    for (auto& b : v) b = static_cast<uint8_t>(rng.next_below(256));
    return v;
}

}  // namespace

TEST_CASE("toeplitz matches the explicit matrix product") {
    Rng rng(100);
    for (auto [n, l] : std::vector<std::pair<std::size_t, std::size_t>>{
             {1, 1}, {5, 3}, {64, 34}, {127, 64}, {200, 86}, {257, 100}, {1000, 64}}) {
        BitVec input = random_bits(rng, n);
        BitVec seed = random_bits(rng, n + l - 1);
        CHECK(toeplitz_hash(input, seed, l) == testsup::naive_toeplitz(input, seed, l));
    }
}

TEST_CASE("toeplitz is linear in the input") {
    Rng rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 50 + rng.next_below(300);
        std::size_t l = 1 + rng.next_below(n);
        BitVec seed = random_bits(rng, n + l - 1);
        BitVec x = random_bits(rng, n);
        BitVec y = random_bits(rng, n);
        BitVec xy = x;
        xy ^= y;
        BitVec want = toeplitz_hash(x, seed, l);
        want ^= toeplitz_hash(y, seed, l);
        CHECK(toeplitz_hash(xy, seed, l) == want);
    }
}

TEST_CASE("toeplitz rejects bad geometry") {
    Rng rng(102);
    BitVec input = random_bits(rng, 10);
    CHECK_THROWS_AS(toeplitz_hash(input, random_bits(rng, 10), 5), std::invalid_argument);
    CHECK_THROWS_AS(toeplitz_hash(BitVec(), random_bits(rng, 4), 5), std::invalid_argument);
    CHECK(toeplitz_hash(input, random_bits(rng, 9), 0).size() == 0);
    CHECK(toeplitz_hash(input, random_bits(rng, 14), 5).size() == 5);
}

TEST_CASE("toeplitz seed layout anchors first row and column") {
    // With exactly one seed bit set the output rows that can see it are
    // fixed by T[i][j] = seed[l-1-i+j].
    std::size_t n = 8, l = 4;
    BitVec input(n);
    input.set(2, 1);
    BitVec seed(n + l - 1);
    seed.set(l - 1 - 1 + 2, 1);  // T[1][2] = 1, every other entry 0
    BitVec out = toeplitz_hash(input, seed, l);
    CHECK(out.get(1));
    CHECK(out.popcount() == 1);
}

TEST_CASE("field polynomials are irreducible") {
    for (int k : {8, 10, 16, 32, 64, 128}) {
        CAPTURE(k);
        CHECK(testsup::poly_is_irreducible(k, Gf2k::default_poly(k)));
    }
    // The oracle itself can tell a reducible polynomial apart.
    CHECK_FALSE(testsup::poly_is_irreducible(8, 0x1A));   // x^8+x^4+x^3+x divisible by x
    CHECK_FALSE(testsup::poly_is_irreducible(4, 0x00));   // x^4 = (x^2)^2
    CHECK(testsup::poly_is_irreducible(4, 0x03));         // x^4+x+1
}

TEST_CASE("field multiply matches limb-vector long division") {
    for (int k : {8, 16, 64, 128}) {
        CAPTURE(k);
        Gf2k f(k);
        Rng rng(200 + k);
        for (int trial = 0; trial < 200; ++trial) {
            u128 a = random_u128(rng) & f.mask;
            u128 b = random_u128(rng) & f.mask;
            CHECK(f.mul(a, b) == testsup::naive_gf2_mul(k, f.poly_low, a, b));
        }
    }
}

TEST_CASE("field axioms hold") {
    Gf2k f(64);
    Rng rng(201);
    for (int trial = 0; trial < 100; ++trial) {
        u128 a = rng.next_u64(), b = rng.next_u64(), c = rng.next_u64();
        CHECK(f.mul(a, b) == f.mul(b, a));
        CHECK(f.mul(a, f.mul(b, c)) == f.mul(f.mul(a, b), c));
        CHECK(f.mul(a, b ^ c) == (f.mul(a, b) ^ f.mul(a, c)));
        CHECK(f.mul(a, 1) == a);
        CHECK(f.mul(a, 0) == u128{0});
    }
    // Fermat: a^(2^k) = a, checked through pow's square chain.
    Gf2k f8(8);
    for (u128 a = 0; a < 256; ++a) {
        u128 r = a;
        for (int i = 0; i < 8; ++i) r = f8.mul(r, r);
        CHECK(r == a);
    }
}

TEST_CASE("field pow matches repeated multiplication") {
    Gf2k f(128);
    Rng rng(202);
    u128 a = random_u128(rng) & f.mask;
    u128 acc = 1;
    for (int e = 0; e <= 40; ++e) {
        CHECK(f.pow(a, static_cast<u128>(e)) == acc);
        acc = f.mul(acc, a);
    }
    CHECK(f.pow(0, 0) == u128{1});
}

TEST_CASE("polynomial hash matches the power-sum oracle") {
    Rng rng(300);
    // k=10 exercises the bit-unaligned block extraction path.
    for (int k : {10, 64, 128}) {
        CAPTURE(k);
        Gf2k f(k);
        for (std::size_t nbytes : {1u, 7u, 16u, 33u, 200u}) {
            auto msg = random_bytes(rng, nbytes);
            u128 point = random_u128(rng) & f.mask;
            CHECK(poly_eval(f, msg, nbytes * 8, point) ==
                  testsup::naive_poly_eval(f, msg, nbytes * 8, point));
        }
    }
}

TEST_CASE("polynomial hash separates length from padding") {
    // A message and its zero-extension share every data block; only the
    // length block tells them apart.
    Gf2k f(64);
    std::vector<uint8_t> a = {0xAB, 0xCD};
    std::vector<uint8_t> b = {0xAB, 0xCD, 0x00, 0x00};
    Rng rng(301);
    int differ = 0;
    for (int trial = 0; trial < 50; ++trial) {
        u128 point = rng.next_u64();
        if (poly_eval(f, a, 16, point) != poly_eval(f, b, 32, point)) ++differ;
    }
    CHECK(differ >= 49);
}

TEST_CASE("verify hash is deterministic and tag-bounded") {
    Rng rng(302);
    BitVec data = random_bits(rng, 5000);
    uint64_t x = rng.next_u64(), r = rng.next_u64();
    uint64_t t1 = verify_hash(data, x, r);
    CHECK(t1 == verify_hash(data, x, r));
    CHECK(t1 < (uint64_t{1} << 34));
    CHECK(verify_hash(data, x, r, 12) < (uint64_t{1} << 12));
    CHECK_THROWS_AS(verify_hash(data, x, r, 0), std::invalid_argument);
    CHECK_THROWS_AS(verify_hash(data, x, r, 65), std::invalid_argument);
}

TEST_CASE("verify hash catches every single-bit flip in a battery") {
    // 34-bit tags at random points: one expected miss per 2^34 trials, so
    // any observed miss is a bug.
    Rng rng(303);
    BitVec data = random_bits(rng, 2048);
    for (int trial = 0; trial < 200; ++trial) {
        uint64_t x = rng.next_u64() | 1, r = rng.next_u64() | 1;
        uint64_t base = verify_hash(data, x, r);
        BitVec mod = data;
        mod.flip(rng.next_below(data.size()));
        CHECK(verify_hash(mod, x, r) != base);
    }
}

TEST_CASE("verify hash two-stage collision rate meets the bound at small width") {
    // Scaled-down statistical check: 8-bit tags, random distinct messages.
    // Bound per pair: (blocks+2)/2^64 + 2^-8 ~ 1/256.
    Rng rng(304);
    int collisions = 0;
    const int pairs = 20000;
    for (int i = 0; i < pairs; ++i) {
        BitVec a = random_bits(rng, 256);
        BitVec b = a;
        b.flip(rng.next_below(256));
        uint64_t x = rng.next_u64() | 1, r = rng.next_u64() | 1;
        if (verify_hash(a, x, r, 8) == verify_hash(b, x, r, 8)) ++collisions;
    }
    // Expect ~ pairs/256 = 78; allow five sigma (~44).
    CHECK(collisions < 125);
    CHECK(verify_collision_bound(200000, 34) < 1e-9);
    CHECK(verify_collision_bound(200000, 34) > std::pow(2.0, -34.0));
}

TEST_CASE("auth tag round trips and rejects tampering") {
    Rng rng(400);
    auto msg = random_bytes(rng, 300);
    u128 key = random_u128(rng);
    BitVec otp = random_bits(rng, 86);
    BitVec tag = auth_tag(msg, key, otp);
    REQUIRE(tag.size() == 86);
    CHECK(auth_check(msg, key, otp, tag));

    for (int trial = 0; trial < 100; ++trial) {
        auto bad = msg;
        bad[rng.next_below(bad.size())] ^= static_cast<uint8_t>(1 + rng.next_below(255));
        CHECK_FALSE(auth_check(bad, key, otp, tag));
    }
    BitVec badtag = tag;
    badtag.flip(17);
    CHECK_FALSE(auth_check(msg, key, otp, badtag));
    CHECK_FALSE(auth_check(msg, key, otp, random_bits(rng, 85)));
}

TEST_CASE("auth tag is the otp-shifted evaluation") {
    Rng rng(401);
    auto msg = random_bytes(rng, 64);
    u128 key = random_u128(rng);
    BitVec otp = random_bits(rng, 86);
    BitVec zero(86);
    BitVec shifted = auth_tag(msg, key, zero);
    shifted ^= otp;
    CHECK(auth_tag(msg, key, otp) == shifted);
}

TEST_CASE("auth forgery rate at scaled-down width stays near the bound") {
    // 10-bit tags over GF(2^10): flip one message bit, try the unchanged
    // tag. Success probability per trial <= (blocks+2)/2^10.
    Rng rng(402);
    Gf2k f(10);
    const int trials = 30000;
    int forged = 0;
    for (int i = 0; i < trials; ++i) {
        auto msg = random_bytes(rng, 8);
        u128 key = rng.next_below(1024);
        BitVec otp = random_bits(rng, 10);
        BitVec tag = auth_tag_field(f, msg, key, otp, 10);
        auto bad = msg;
        bad[rng.next_below(bad.size())] ^= static_cast<uint8_t>(1 + rng.next_below(255));
        BitVec tag2 = auth_tag_field(f, bad, key, otp, 10);
        if (tag2 == tag) ++forged;
    }
    // blocks = ceil(64/10)+1 = 8, bound ~ trials * 9/1024 ~ 264. Five sigma
    // above the bound would indicate a broken family.
    CHECK(forged < 350);
    CHECK(auth_forgery_bound(1 << 20, 86) < 1e-20);
}

TEST_CASE("ledger draws fifo and attributes use") {
    BitVec boot = BitVec::parse("1011001110001111");
    KeyMaterialLedger led(boot);
    CHECK(led.available() == 16);
    BitVec a = led.draw(4, KeyUse::AuthEvalKey);
    CHECK(a == BitVec::parse("1011"));
    BitVec b = led.draw(4, KeyUse::AuthOtp);
    CHECK(b == BitVec::parse("0011"));
    CHECK(led.drawn_eval_key() == 4);
    CHECK(led.drawn_otp() == 4);
    CHECK(led.drawn_total() == 8);
    CHECK(led.available() == 8);

    led.deposit(BitVec::parse("01"));
    CHECK(led.available() == 10);
    CHECK(led.total_deposited() == 2);
    BitVec rest = led.draw(10, KeyUse::AuthOtp);
    CHECK(rest == BitVec::parse("1000111101"));
    CHECK_THROWS_AS(led.draw(1, KeyUse::AuthOtp), std::runtime_error);
}

TEST_CASE("ledger deposits extend the tail in order") {
    KeyMaterialLedger led(BitVec::parse("11"));
    led.deposit(BitVec::parse("00"));
    led.deposit(BitVec::parse("10"));
    CHECK(led.draw(6, KeyUse::AuthOtp) == BitVec::parse("110010"));
}
