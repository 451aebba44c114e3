#include "doctest.h"

#include "btq/field.hpp"
#include "fields_fixture.hpp"

using namespace btq;

TEST_CASE("golden ratio arithmetic") {
    auto K = make_Qsqrt5();
    FieldElement phi = K->element({Rat(0), Rat(1)});
    FieldElement one = K->one();
    // phi^2 = phi + 1 (defining relation)
    CHECK(phi * phi == phi + one);
    // x * x^{-1} = 1 for x = 3phi - 2
    FieldElement x = phi * Rat(3) - K->from_rational(Rat(2));
    CHECK(x * x.inverse() == one);
    CHECK_THROWS(K->zero().inverse());
}

TEST_CASE("norm and trace") {
    auto K = make_Qsqrt5();
    FieldElement phi = K->element({Rat(0), Rat(1)});
    FieldElement x = phi * Rat(-5) + K->from_rational(Rat(2));
    CHECK(x.norm() == Rat(-31));
    CHECK(K->one().norm() == Rat(1));
    CHECK(K->one().trace() == Rat(2));
    // (3 sqrt5 - 1)/2 = 3 phi - 2 has norm -11
    FieldElement y = phi * Rat(3) - K->from_rational(Rat(2));
    CHECK(y.norm() == Rat(-11));
}

TEST_CASE("norm multiplicative, trace additive") {
    auto K = make_Qsqrt97();
    Rng rng(7);
    for (int t = 0; t < 50; ++t) {
        QVec a{Rat(rng.next_signed(-9, 9)), Rat(rng.next_signed(-9, 9))};
        QVec b{Rat(rng.next_signed(-9, 9)), Rat(rng.next_signed(-9, 9))};
        FieldElement x = K->element(a), y = K->element(b);
        CHECK((x * y).norm() == x.norm() * y.norm());
        CHECK((x + y).trace() == x.trace() + y.trace());
    }
}

TEST_CASE("factorization identity in Q(sqrt97)") {
    auto K = make_Qsqrt97();
    FieldElement th = K->theta();
    FieldElement ten = K->from_rational(Rat(10));
    CHECK((ten - th) * (ten + th) == K->from_rational(Rat(3)));
}

TEST_CASE("total positivity") {
    auto K = make_Qsqrt5();
    CHECK(K->is_totally_positive(K->from_rational(Rat(2))));
    // sqrt5 = 2 phi - 1 is negative at one embedding
    FieldElement s5 = K->element({Rat(-1), Rat(2)});
    CHECK(!K->is_totally_positive(s5));
    FieldElement x = K->from_rational(Rat(3)) + s5;
    CHECK(K->is_totally_positive(x));
    // squares are totally positive
    Rng rng(11);
    for (int t = 0; t < 30; ++t) {
        FieldElement z = K->element({Rat(rng.next_signed(-9, 9)), Rat(rng.next_signed(-9, 9))});
        if (z.is_zero()) continue;
        CHECK(K->is_totally_positive(z * z));
    }
}

TEST_CASE("split_prime basic") {
    auto K5 = make_Qsqrt5();
    CHECK(split_prime(*K5, Int(2)).empty());   // x^2-x-1 irreducible mod 2
    CHECK(split_prime(*K5, Int(5)).empty());   // ramified
    auto s31 = split_prime(*K5, Int(31));
    REQUIRE(s31.size() == 2);

    auto K97 = make_Qsqrt97();
    auto s3 = split_prime(*K97, Int(3));
    REQUIRE(s3.size() == 2);
    CHECK(s3[0].r == 1);
    CHECK(s3[1].r == 2);

    auto KQ = make_Q();
    auto s7 = split_prime(*KQ, Int(7));
    REQUIRE(s7.size() == 1);
    CHECK(s7[0].r == 0);
}

TEST_CASE("split_prime at an index divisor") {
    auto K = make_Qsqrt97();
    // 97 = 1 mod 8, so 2 splits; data comes from the table
    auto s2 = split_prime(*K, Int(2));
    REQUIRE(s2.size() == 2);
    CHECK(s2[0].r != s2[1].r);
    // each site can embed theta: theta^2 = 97 mod 2^20
    for (const auto& s : s2) {
        Int im = s.embed(K->theta(), 20);
        CHECK(mod_pos(im * im, pow_int(Int(2), 20)) == mod_pos(Int(97), pow_int(Int(2), 20)));
    }
}

TEST_CASE("site valuation and embedding") {
    auto K = make_Qsqrt5();
    auto sites = split_prime(*K, Int(11));
    // identify the site with v(3 phi - 2) = 1
    FieldElement x = K->element({Rat(-2), Rat(3)});
    int hits = 0;
    for (auto& s : sites) {
        unsigned long v = s.valuation(x);
        if (v == 1) ++hits;
        // embed respects multiplication
        Int m = pow_int(Int(11), 8);
        CHECK(mod_pos(s.embed(x, 8) * s.embed(x, 8), m) == s.embed(x * x, 8));
    }
    CHECK(hits == 1);
}

TEST_CASE("principalize") {
    auto K5 = make_Qsqrt5();
    auto sites = split_prime(*K5, Int(11));
    for (auto& s : sites) {
        principalize(s);
        CHECK(s.d == 1);
        CHECK(abs(s.delta.norm()) == Rat(11));
        CHECK(s.valuation(s.delta) == 1);
    }

    auto K97 = make_Qsqrt97();
    auto s3 = split_prime(*K97, Int(3));
    principalize(s3[0]);
    CHECK(s3[0].d == 1);
    CHECK(abs(s3[0].delta.norm()) == Rat(3));

    auto KQ = make_Q();
    auto sq = split_prime(*KQ, Int(3));
    principalize(sq[0]);
    CHECK(sq[0].d == 1);
    CHECK(abs(sq[0].delta.norm()) == Rat(3));
}

TEST_CASE("principalize finds class order two") {
    auto K = make_Qsqrt10();
    auto sites = split_prime(*K, Int(3));
    REQUIRE(sites.size() == 2);
    principalize(sites[0]);
    CHECK(sites[0].d == 2);
    CHECK(abs(sites[0].delta.norm()) == Rat(9));
    // delta generates the square of the prime
    PrimeIdeal q = prime_of_site(sites[0]);
    CHECK(ideal_valuation(q, sites[0].delta) == 2);
}

TEST_CASE("enumerate_ideals") {
    auto KQ = make_Q();
    auto ids = enumerate_ideals(*KQ, Int(3));
    REQUIRE(ids.size() == 3);
    CHECK(ids[0].norm == 1);
    CHECK(ids[1].norm == 2);
    CHECK(ids[2].norm == 3);

    auto K5 = make_Qsqrt5();
    auto ids5 = enumerate_ideals(*K5, Int(5));
    // norms 1, 4 (inert 2), 5 (ramified sqrt5)
    REQUIRE(ids5.size() == 3);
    CHECK(ids5[0].norm == 1);
    CHECK(ids5[1].norm == 4);
    CHECK(ids5[2].norm == 5);

    auto K97 = make_Qsqrt97();
    auto ids97 = enumerate_ideals(*K97, Int(3));
    // (1), the two norm-2 primes (97 = 1 mod 8 so 2 splits), two primes above 3
    REQUIRE(ids97.size() == 5);
    CHECK(ids97[1].norm == 2);
    CHECK(ids97[2].norm == 2);
    CHECK(ids97[3].norm == 3);
    CHECK(ids97[4].norm == 3);
}

TEST_CASE("ideal_of_element") {
    auto K = make_Qsqrt5();
    FieldElement x = K->element({Rat(-2), Rat(3)});  // norm -11
    Ideal I = ideal_of_element(*K, x);
    REQUIRE(I.factors.size() == 1);
    CHECK(I.norm == 11);
    CHECK(I.factors[0].second == 1);
}

TEST_CASE("zeta bounds") {
    auto KQ = make_Q();
    auto z = zeta2_bounds(*KQ, 2);
    CHECK(z.lower <= 4.0 / 3.0 + 1e-12);
    CHECK(z.lower >= 4.0 / 3.0 - 1e-9);
    CHECK(z.lower <= 1.6449340668482264);  // zeta(2)

    auto K5 = make_Qsqrt5();
    auto z5 = zeta2_bounds(*K5, 10000);
    CHECK(z5.lower >= 1.15);
    CHECK(z5.lower <= 1.17);
    CHECK(z5.upper >= z5.lower);
    CHECK(z5.upper - z5.lower < 0.01);
    // monotone in the bound
    CHECK(zeta2_lower(*K5, 100) <= z5.lower);
    // trivial bound
    CHECK(zeta2_lower(*K5, 1) == 1.0);
}

TEST_CASE("automorphisms") {
    auto K = make_Qsqrt97();
    FieldElement th = K->theta();
    FieldElement x = K->from_rational(Rat(10)) - th;
    // identity
    CHECK(K->apply_automorphism(0, x) == x);
    // conjugation sends 10 - sqrt97 to 10 + sqrt97
    CHECK(K->apply_automorphism(1, x) == K->from_rational(Rat(10)) + th);
    // rational ideals are fixed: check on the primes above 3
    auto s3 = split_prime(*K, Int(3));
    PrimeIdeal q0 = prime_of_site(s3[0]);
    PrimeIdeal q1 = prime_of_site(s3[1]);
    PrimeIdeal img = apply_automorphism(*K, 1, q0);
    CHECK(img == q1);
}

TEST_CASE("quotient ring residues") {
    auto K = make_Qsqrt5();
    auto sites = split_prime(*K, Int(11));
    QuotientRing R = quotient_ring(*K, sites[0].ideal_hnf);
    CHECK(R.size() == 11);
    CHECK(R.residues().size() == 11);
    // multiplicative order of any nonzero residue divides 10
    ZVec g{Int(0), Int(1)};
    ZVec p10 = R.pow(g, Int(10));
    CHECK(p10 == R.one());
}

TEST_CASE("split prime counts degree sum") {
    auto K = make_Qsqrt97();
    for (long p : {3, 5, 7, 11, 13}) {
        auto qs = primes_above(*K, Int(p));
        unsigned total = 0;
        for (auto& q : qs) total += q.e * q.f;
        CHECK(total == 2);
    }
}
