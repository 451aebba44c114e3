#include "doctest.h"

#include "btq/lattice.hpp"

using namespace btq;

namespace {

ZMat to_z(std::vector<std::vector<long>> rows) {
    ZMat out;
    for (auto& r : rows) {
        ZVec v;
        for (long x : r) v.emplace_back(x);
        out.push_back(std::move(v));
    }
    return out;
}

GramForm standard_gram(std::size_t n) {
    GramForm g{QMat(n, QVec(n, Rat(0)))};
    for (std::size_t i = 0; i < n; ++i) g.g[i][i] = 1;
    return g;
}

// box-scan oracle: all lattice vectors x*B with coefficients |x_i| <= radius
std::vector<ZVec> brute_short(const ZMat& basis, const GramForm& g, const Rat& bound,
                              long radius) {
    std::vector<ZVec> out;
    std::size_t k = basis.size();
    std::vector<long> x(k, -radius);
    while (true) {
        ZVec v(basis[0].size(), Int(0));
        bool zero = true;
        for (std::size_t i = 0; i < k; ++i) {
            if (x[i] != 0) zero = false;
            for (std::size_t j = 0; j < v.size(); ++j) v[j] += Int(x[i]) * basis[i][j];
        }
        if (!zero && gram_value(g, v) <= bound) {
            for (const auto& c : v) {
                if (c == 0) continue;
                if (c < 0)
                    for (auto& y : v) y = -y;
                break;
            }
            out.push_back(v);
        }
        std::size_t i = 0;
        for (; i < k; ++i) {
            if (++x[i] <= radius) break;
            x[i] = -radius;
        }
        if (i == k) break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

TEST_CASE("hnf canonical form") {
    CHECK(hnf(to_z({{2, 0}, {0, 3}, {1, 0}})) == to_z({{1, 0}, {0, 3}}));
    CHECK(hnf(to_z({{1, 0}, {0, 1}})) == to_z({{1, 0}, {0, 1}}));
    // span invariance under row shuffles / unimodular mixing
    ZMat base = to_z({{4, 1, 0}, {2, 7, 3}, {0, 0, 5}});
    ZMat mixed = to_z({{2, 7, 3}, {4, 1, 0}, {6, 8, 8}, {0, 0, 5}});
    CHECK(hnf(base) == hnf(mixed));
}

TEST_CASE("kernel over Z") {
    // kernel of [[1],[1]] (x + y = 0 on rows) is (1,-1)
    ZMat a = to_z({{1}, {1}});
    ZMat k = kernel_z(a);
    REQUIRE(k.size() == 1);
    ZVec prod(1, Int(0));
    for (std::size_t i = 0; i < 2; ++i) prod[0] += k[0][i] * a[i][0];
    CHECK(prod[0] == 0);
}

TEST_CASE("hnf membership") {
    ZMat h = hnf(to_z({{2, 1}, {0, 3}}));
    CHECK(hnf_member(h, {Int(2), Int(4)}));
    CHECK(!hnf_member(h, {Int(1), Int(0)}));
}

TEST_CASE("lattice intersection") {
    ZMat a = to_z({{2, 0}, {0, 1}});
    ZMat b = to_z({{1, 0}, {0, 3}});
    CHECK(lattice_intersect(a, b) == to_z({{2, 0}, {0, 3}}));
}

TEST_CASE("lll basics") {
    GramForm g = standard_gram(2);
    // orthogonal basis unchanged up to sign
    ZMat ortho = to_z({{1, 0}, {0, 1}});
    CHECK(hnf(lll(ortho, g)) == ortho);
    // skewed basis reduces to short first vector
    ZMat skew = to_z({{1, 0}, {1000, 1}});
    ZMat red = lll(skew, g);
    CHECK(gram_value(g, red[0]) <= 2);
    // unimodularity: span preserved
    CHECK(hnf(red) == hnf(skew));
}

TEST_CASE("lll rejects indefinite gram") {
    GramForm g{QMat{{Rat(1), Rat(0)}, {Rat(0), Rat(-1)}}};
    ZMat b = to_z({{1, 0}, {0, 1}});
    CHECK_THROWS(lll(b, g));
}

TEST_CASE("short vectors on Z^2") {
    GramForm g = standard_gram(2);
    ZMat b = to_z({{1, 0}, {0, 1}});
    auto sv = short_vectors(b, g, Rat(1));
    REQUIRE(sv.size() == 2);
    CHECK(sv[0] == ZVec{Int(0), Int(1)});
    CHECK(sv[1] == ZVec{Int(1), Int(0)});
    CHECK(short_vectors(b, g, Rat(1, 2)).empty());
}

TEST_CASE("short vectors of the Hurwitz trace form") {
    // Gram of trd(x ybar) on 1, i, j, (1+i+j+ij)/2 in (-1,-1/Q)
    GramForm g{QMat{{Rat(2), Rat(0), Rat(0), Rat(1)},
                    {Rat(0), Rat(2), Rat(0), Rat(1)},
                    {Rat(0), Rat(0), Rat(2), Rat(1)},
                    {Rat(1), Rat(1), Rat(1), Rat(2)}}};
    ZMat b = to_z({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}});
    auto sv = short_vectors(b, g, Rat(2));
    CHECK(sv.size() == 12);  // 24 units up to sign
}

TEST_CASE("short vectors match brute force") {
    Rng rng(1234);
    GramForm g = standard_gram(3);
    for (int trial = 0; trial < 20; ++trial) {
        ZMat b(3, ZVec(3));
        // random unimodular-ish basis of a random sublattice
        for (auto& row : b)
            for (auto& x : row) x = Int(rng.next_signed(-4, 4));
        ZMat h = hnf(b);
        if (h.size() < 3) continue;  // want full rank
        Rat bound(rng.next(9) + 1);
        auto fast = short_vectors(h, g, bound);
        auto slow = brute_short(h, g, bound, 12);
        std::sort(fast.begin(), fast.end());
        CHECK(fast == slow);
    }
}

TEST_CASE("short vectors with rational gram") {
    GramForm g{QMat{{Rat(1, 4), Rat(0)}, {Rat(0), Rat(9)}}};
    ZMat b = to_z({{1, 0}, {0, 1}});
    auto sv = short_vectors(b, g, Rat(1));
    // (1,0) has value 1/4, (2,0) has 1; (0,1) has 9
    REQUIRE(sv.size() == 2);
    CHECK(sv[0] == ZVec{Int(1), Int(0)});
    CHECK(sv[1] == ZVec{Int(2), Int(0)});
}
