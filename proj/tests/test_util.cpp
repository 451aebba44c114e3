#include "doctest.h"

#include "btq/util.hpp"

using namespace btq;

TEST_CASE("integer helpers") {
    CHECK(pow_int(Int(3), 4) == 81);
    CHECK(mod_pos(Int(-7), Int(5)) == 3);
    CHECK(invmod(Int(3), Int(31)) == 21);
    CHECK(valuation(Int(48), Int(2)) == 4);
    CHECK(isqrt_floor(Int(99)) == 9);
    Int r;
    CHECK(is_square(Int(144), &r));
    CHECK(r == 12);
    CHECK(!is_square(Int(145)));
}

TEST_CASE("exact sqrt interval endpoints") {
    // floor(0 + sqrt(2)) = 1, ceil(0 - sqrt(2)) = -1
    CHECK(floor_plus_sqrt(Rat(0), Rat(2)) == 1);
    CHECK(ceil_minus_sqrt(Rat(0), Rat(2)) == -1);
    // exact square radicand
    CHECK(floor_plus_sqrt(Rat(1, 2), Rat(9, 4)) == 2);
    CHECK(ceil_minus_sqrt(Rat(1, 2), Rat(9, 4)) == -1);
    CHECK(floor_plus_sqrt(Rat(-5), Rat(0)) == -5);
}

TEST_CASE("factor_int") {
    auto f = factor_int(Int(360));
    REQUIRE(f.size() == 3);
    CHECK(f[0] == std::make_pair(Int(2), 3u));
    CHECK(f[1] == std::make_pair(Int(3), 2u));
    CHECK(f[2] == std::make_pair(Int(5), 1u));
}

TEST_CASE("sturm sequences") {
    // x^2 - x - 1 has two real roots
    SturmSequence s(qpoly_from_z(ZPoly{-1, -1, 1}));
    CHECK(s.count_real_roots() == 2);
    // x^2 + 1 has none
    SturmSequence s2(qpoly_from_z(ZPoly{1, 0, 1}));
    CHECK(s2.count_real_roots() == 0);
    // isolation separates the roots of x^2 - 2
    auto iv = isolate_real_roots(qpoly_from_z(ZPoly{-2, 0, 1}));
    REQUIRE(iv.size() == 2);
    CHECK(iv[0].second <= iv[1].first);
}

TEST_CASE("poly mod p basics") {
    // x^2 - 97 mod 3 = x^2 + 2: roots 1, 2
    PolyModP f = poly_reduce_mod(ZPoly{-97, 0, 1}, 3);
    auto roots = polyp_roots(f);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0] == 1);
    CHECK(roots[1] == 2);

    // x^2 - x - 1 irreducible mod 2
    PolyModP g = poly_reduce_mod(ZPoly{-1, -1, 1}, 2);
    CHECK(polyp_roots(g).empty());
    auto dd = polyp_distinct_degree(g);
    REQUIRE(dd.size() == 1);
    CHECK(dd[0].first == 2);
}

TEST_CASE("poly mod p full factorization") {
    // (x-1)^2 (x+1) mod 5 = x^3 - x^2 - x + 1
    PolyModP f = poly_reduce_mod(ZPoly{1, -1, -1, 1}, 5);
    auto fac = polyp_factor_full(f);
    REQUIRE(fac.size() == 2);
    unsigned total = 0;
    for (auto& [g, m] : fac) total += m * g.deg();
    CHECK(total == 3);

    // wild: x^2 - 3 mod 2 = (x+1)^2
    PolyModP w = poly_reduce_mod(ZPoly{-3, 0, 1}, 2);
    auto fw = polyp_factor_full(w);
    REQUIRE(fw.size() == 1);
    CHECK(fw[0].first.deg() == 1);
    CHECK(fw[0].second == 2);
}

TEST_CASE("rational parsing") {
    CHECK(rat_from_string("3/4") == Rat(3, 4));
    CHECK(rat_from_string("-12") == Rat(-12));
    CHECK(rat_to_string(Rat(5, 10)) == "1/2");
}
