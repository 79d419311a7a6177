#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <set>
#include <vector>

#include "ergopt/dadic.hpp"
#include "ergopt/rng.hpp"

using ergopt::DadicInt;
using ergopt::Rng;

TEST_CASE("iota digit expansions") {
    REQUIRE(DadicInt::iota(0, 2, 5).digits() == std::vector<int>{0, 0, 0, 0, 0});
    REQUIRE(DadicInt::iota(6, 2, 5).digits() == std::vector<int>{0, 1, 1, 0, 0});
    // 137 mod 125 = 12 = 2 + 2*5
    REQUIRE(DadicInt::iota(137, 5, 3).digits() == std::vector<int>{2, 2, 0});
}

TEST_CASE("carry addition") {
    REQUIRE(DadicInt::iota(1, 2, 6).add(DadicInt::iota(1, 2, 6)) ==
            DadicInt::iota(2, 2, 6));
    REQUIRE(DadicInt::iota(7, 10, 4).add(DadicInt::iota(5, 10, 4)) ==
            DadicInt::iota(12, 10, 4));
    // (1,1,1,1) is d^K - 1, one more wraps to zero
    const DadicInt all_ones(2, {1, 1, 1, 1});
    REQUIRE(all_ones.add(DadicInt::iota(1, 2, 4)) == DadicInt::zero(2, 4));
    REQUIRE_THROWS_AS(DadicInt::iota(1, 2, 4).add(DadicInt::iota(1, 2, 5)),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(DadicInt::iota(1, 2, 4).add(DadicInt::iota(1, 3, 4)),
                      std::invalid_argument);
}

TEST_CASE("negation") {
    REQUIRE(DadicInt::zero(3, 4).neg() == DadicInt::zero(3, 4));
    REQUIRE(DadicInt::iota(1, 2, 4).neg() == DadicInt(2, {1, 1, 1, 1}));
    // 5 + 22 = 27 = 3^3
    REQUIRE(DadicInt::iota(5, 3, 3).neg() == DadicInt::iota(22, 3, 3));
}

TEST_CASE("adding machine visits every state") {
    REQUIRE(DadicInt::zero(2, 6).adding_machine() == DadicInt::iota(1, 2, 6));
    REQUIRE(DadicInt(2, {1, 0, 1, 0, 0, 0}).adding_machine() ==
            DadicInt::iota(6, 2, 6));

    DadicInt w = DadicInt::zero(2, 6);
    std::set<std::vector<int>> seen;
    for (int i = 0; i < 64; ++i) {
        REQUIRE(seen.insert(w.digits()).second);
        w = w.adding_machine();
    }
    REQUIRE(w == DadicInt::zero(2, 6));
}

TEST_CASE("prepend shifts digits") {
    REQUIRE(DadicInt::zero(2, 6).prepend(0) == DadicInt::zero(2, 6));
    REQUIRE(DadicInt::iota(1, 2, 6).prepend(1) == DadicInt::iota(3, 2, 6));
    REQUIRE(DadicInt::iota(4, 3, 6).prepend(2) == DadicInt::iota(14, 3, 6));
    // the deepest digit is dropped
    REQUIRE(DadicInt(2, {0, 0, 1}).prepend(1) == DadicInt(2, {1, 0, 0}));
}

TEST_CASE("group axioms, exhaustive pairs at small depth") {
    for (int d : {2, 3}) {
        const int K = 4;
        std::uint64_t total = 1;
        for (int j = 0; j < K; ++j) total *= static_cast<std::uint64_t>(d);
        std::vector<DadicInt> table;
        for (std::uint64_t v = 0; v < total; ++v) table.push_back(DadicInt::iota(v, d, K));
        for (std::uint64_t a = 0; a < total; ++a) {
            REQUIRE(table[a].add(table[a].neg()) == table[0]);
            REQUIRE(table[a].add(table[0]) == table[a]);
            for (std::uint64_t b = 0; b < total; ++b)
                REQUIRE(table[a].add(table[b]) == table[(a + b) % total]);
        }
    }
}

TEST_CASE("value homomorphism at every prefix depth") {
    Rng rng(23);
    for (int t = 0; t < 200; ++t) {
        const int d = 2 + rng.uniform_int(4);
        const int K = 6;
        std::vector<int> da(6), db(6);
        for (auto& v : da) v = rng.uniform_int(d);
        for (auto& v : db) v = rng.uniform_int(d);
        const DadicInt a(d, da), b(d, db);
        const DadicInt sum = a.add(b);
        std::uint64_t mod = 1;
        for (int n = 1; n <= K; ++n) {
            mod *= static_cast<std::uint64_t>(d);
            REQUIRE(sum.value_prefix(n) ==
                    (a.value_prefix(n) + b.value_prefix(n)) % mod);
        }
    }
}

TEST_CASE("iota is a semigroup embedding") {
    Rng rng(29);
    for (int t = 0; t < 200; ++t) {
        const int d = 2 + rng.uniform_int(3);
        const int K = 6;
        std::uint64_t cap = 1;
        for (int j = 0; j < K; ++j) cap *= static_cast<std::uint64_t>(d);
        const std::uint64_t m = rng.next_u64() % (cap / 2);
        const std::uint64_t n = rng.next_u64() % (cap - m);
        REQUIRE(DadicInt::iota(m, d, K).add(DadicInt::iota(n, d, K)) ==
                DadicInt::iota(m + n, d, K));
    }
}

TEST_CASE("text round trip") {
    const DadicInt w(3, {2, 0, 1, 2});
    REQUIRE(w.to_string() == "3:4:2,0,1,2");
    REQUIRE(DadicInt::parse(w.to_string()) == w);
    REQUIRE_THROWS_AS(DadicInt::parse("3:4:2,0"), std::invalid_argument);
}

TEST_CASE("digit validation") {
    REQUIRE_THROWS_AS(DadicInt(2, {0, 2}), std::invalid_argument);
    REQUIRE_THROWS_AS(DadicInt(2, {-1}), std::invalid_argument);
    REQUIRE_THROWS_AS(DadicInt(1, {0}), std::invalid_argument);
}
