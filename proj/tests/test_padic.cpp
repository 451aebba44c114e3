#include "doctest.h"

#include <set>

#include "btq/padic.hpp"

using namespace btq;

TEST_CASE("hensel_root") {
    // x^2 - 97, p = 3, r = 1: lift mod 9 is 4 (4^2 = 16 = 97 mod 9)
    CHECK(hensel_root(ZPoly{-97, 0, 1}, Int(3), Int(1), 2) == 4);
    // linear polynomial: root is the constant
    CHECK(hensel_root(ZPoly{-42, 1}, Int(5), Int(2), 4) == mod_pos(Int(42), Int(625)));
    // coherence: reducing a deep lift matches the shallow lift
    Int deep = hensel_root(ZPoly{-1, -1, 1}, Int(31), Int(13), 8);
    Int shallow = hensel_root(ZPoly{-1, -1, 1}, Int(31), Int(13), 3);
    CHECK(mod_pos(deep, pow_int(Int(31), 3)) == shallow);
    // both roots of x^2-x-1 mod 31 lift to roots mod 31^6
    for (long r : {13, 19}) {
        Int s = hensel_root(ZPoly{-1, -1, 1}, Int(31), Int(r), 6);
        Int m = pow_int(Int(31), 6);
        CHECK(mod_pos(s * s - s - 1, m) == 0);
    }
    CHECK_THROWS(hensel_root(ZPoly{-1, 0, 1}, Int(2), Int(1), 4));  // f'(1) = 0 mod 2
}

TEST_CASE("hensel_lift_factor") {
    ZPoly f{-97, 0, 1};
    ZPoly g{2, 1};  // x + 2 = x - 1 mod 3
    ZPoly lifted = hensel_lift_factor(f, g, Int(3), 5);
    REQUIRE(lifted.size() == 2);
    CHECK(lifted[1] == 1);
    // root of the lifted factor squares to 97 mod 3^5
    Int root = mod_pos(-lifted[0], pow_int(Int(3), 5));
    CHECK(mod_pos(root * root, pow_int(Int(3), 5)) == mod_pos(Int(97), pow_int(Int(3), 5)));
}

TEST_CASE("howell identity and annihilator") {
    // L = identity: kernel empty, solutions = Z
    ZMat l{{Int(1), Int(0)}, {Int(0), Int(1)}};
    ZMat z{{Int(3), Int(4)}};
    auto [k, s] = howell_solve_z(Int(5), 3, l, z);
    CHECK(k.empty());
    REQUIRE(s.size() == 1);
    CHECK(s[0] == ZVec{Int(3), Int(4)});

    // L = (p) as 1x1 mod p^2: kernel generated by (p)
    ZMat lp{{Int(5)}};
    auto kp = howell_left_kernel_z(Int(5), 2, lp);
    REQUIRE(kp.size() == 1);
    CHECK(mod_pos(kp[0][0], Int(25)) == 5);
}

TEST_CASE("howell unsolvable target") {
    ZMat l{{Int(5)}};  // image = 5 Z/25
    ZMat z{{Int(3)}};
    CHECK_THROWS_WITH_AS(howell_solve_z(Int(5), 2, l, z), "target outside image", error);
}

TEST_CASE("howell kernel completeness (exhaustive small case)") {
    // p^N = 3^2, random 2x2 systems; compare against brute force
    Int p(3);
    unsigned long N = 2;
    Int pn = pow_int(p, N);
    Rng rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        ZMat l(2, ZVec(2));
        for (auto& row : l)
            for (auto& x : row) x = Int(rng.next(9));
        auto ker = howell_left_kernel_z(p, N, l);
        // brute force kernel
        std::set<std::pair<long, long>> brute;
        for (long x0 = 0; x0 < 9; ++x0)
            for (long x1 = 0; x1 < 9; ++x1) {
                Int a = mod_pos(x0 * l[0][0] + x1 * l[1][0], pn);
                Int b = mod_pos(x0 * l[0][1] + x1 * l[1][1], pn);
                if (a == 0 && b == 0) brute.insert({x0, x1});
            }
        // span of returned kernel rows
        std::set<std::pair<long, long>> span;
        std::vector<std::pair<long, long>> frontier{{0, 0}};
        span.insert({0, 0});
        while (!frontier.empty()) {
            auto [a, b] = frontier.back();
            frontier.pop_back();
            for (const auto& kr : ker) {
                long na = mod_pos(Int(a) + kr[0], pn).get_si();
                long nb = mod_pos(Int(b) + kr[1], pn).get_si();
                if (span.insert({na, nb}).second) frontier.push_back({na, nb});
            }
        }
        CHECK(span == brute);
    }
}

TEST_CASE("local ring sqrt") {
    LocalRing R = LocalRing::zp(Int(5), 8);
    auto s = R.sqrt(R.from_int(Int(4)));
    REQUIRE(s.has_value());
    CHECK(R.eq(R.mul(*s, *s), R.from_int(Int(4))));
    CHECK(!R.sqrt(R.from_int(Int(2))).has_value());  // 2 is not a QR mod 5
    // valuation handling: 25 * unit
    auto s2 = R.sqrt(R.from_int(Int(100)));
    REQUIRE(s2.has_value());
    CHECK(R.eq(R.mul(*s2, *s2), R.from_int(Int(100))));

    LocalRing R2 = LocalRing::zp(Int(2), 10);
    auto t = R2.sqrt(R2.from_int(Int(17)));
    REQUIRE(t.has_value());
    CHECK(R2.eq(R2.mul(*t, *t), R2.from_int(Int(17))));
    CHECK(!R2.sqrt(R2.from_int(Int(3))).has_value());  // 3 != 1 mod 8

    // Galois ring GR(3^4, 2) with modulus x^2 + 1: -1 is a square in F_9
    LocalRing G = LocalRing::galois(Int(3), 4, ZPoly{1, 0, 1});
    auto u = G.sqrt(G.from_int(Int(-1)));
    REQUIRE(u.has_value());
    CHECK(G.eq(G.mul(*u, *u), G.from_int(Int(-1))));
}

TEST_CASE("local ring inverse and embed") {
    LocalRing G = LocalRing::galois(Int(2), 6, ZPoly{1, 1, 1});  // GR(2^6, 2)
    LocalRing::Elt w = G.zero();
    w[1] = 1;
    LocalRing::Elt u = G.add(G.one(), w);  // 1 + w, a unit
    CHECK(G.is_unit(u));
    CHECK(G.eq(G.mul(u, G.inv(u)), G.one()));
    // w^2 + w + 1 = 0
    CHECK(G.is_zero(G.add(G.add(G.mul(w, w), w), G.one())));
}

TEST_CASE("mat2 helpers") {
    Int mod(125);
    Mat2z a{{Int(1), Int(2), Int(3), Int(4)}};
    Mat2z b{{Int(0), Int(1), Int(1), Int(0)}};
    Mat2z ab = mat2_mul(a, b, mod);
    CHECK(ab.m[0] == 2);
    CHECK(ab.m[1] == 1);
    CHECK(mat2_det(a, mod) == mod_pos(Int(-2), mod));
}
