#include "doctest.h"

#include "btq/bttree.hpp"

using namespace btq;

namespace {

TreeMat random_unit_matrix(Rng& rng, const Int& p) {
    // random integer matrix with det a p-unit (right action representative)
    while (true) {
        TreeMat g{Int(rng.next_signed(-9, 9)), Int(rng.next_signed(-9, 9)),
                  Int(rng.next_signed(-9, 9)), Int(rng.next_signed(-9, 9))};
        Int d = tree_det(g);
        if (d != 0 && !mpz_divisible_p(d.get_mpz_t(), p.get_mpz_t())) return g;
    }
}

TreeMat random_gamma0(Rng& rng, const Int& p) {
    while (true) {
        TreeMat g{Int(rng.next_signed(-9, 9)), Int(rng.next_signed(-9, 9)),
                  p * Int(rng.next_signed(-9, 9)), Int(rng.next_signed(-9, 9))};
        Int d = tree_det(g);
        if (d != 0 && !mpz_divisible_p(d.get_mpz_t(), p.get_mpz_t())) return g;
    }
}

}  // namespace

TEST_CASE("normalize_vertex basics") {
    Int p(2);
    TreeMat id{Int(1), Int(0), Int(0), Int(1)};
    CHECK(normalize_vertex(id, p) == origin_vertex());
    // homothety
    TreeMat three{Int(3), Int(0), Int(0), Int(3)};
    CHECK(normalize_vertex(three, p) == origin_vertex());
    TreeMat twos{Int(2), Int(0), Int(0), Int(2)};
    CHECK(normalize_vertex(twos, p) == origin_vertex());
    CHECK_THROWS(normalize_vertex(TreeMat{Int(1), Int(1), Int(1), Int(1)}, p));
}

TEST_CASE("normalize_vertex right-invariance") {
    Rng rng(42);
    for (long pp : {2, 3, 11}) {
        Int p(pp);
        for (int t = 0; t < 50; ++t) {
            TreeMat m{Int(rng.next_signed(-20, 20)), Int(rng.next_signed(-20, 20)),
                      Int(rng.next_signed(-20, 20)), Int(rng.next_signed(-20, 20))};
            if (tree_det(m) == 0) continue;
            VertexRep v = normalize_vertex(m, p);
            TreeMat g = random_unit_matrix(rng, p);
            CHECK(normalize_vertex(tree_mul(m, g), p) == v);
            // idempotence
            CHECK(normalize_vertex(v.matrix(p), p) == v);
        }
    }
    // spec example: [[1,2],[0,4]] at p=2 invariant under unit right factors
    Int p(2);
    TreeMat m{Int(1), Int(2), Int(0), Int(4)};
    VertexRep v = normalize_vertex(m, p);
    CHECK(v.detval() == 2);
}

TEST_CASE("neighbors") {
    Int p(2);
    auto nb = neighbors(origin_vertex(), p);
    REQUIRE(nb.size() == 3);
    // [[1,0],[0,2]], [[1,0],[1,2]], [[2,0],[0,1]]
    CHECK(nb[0] == VertexRep{0, 1, Int(0)});
    CHECK(nb[1] == VertexRep{0, 1, Int(1)});
    CHECK(nb[2] == VertexRep{1, 0, Int(0)});
    // degree = N(p)+1 = 32 for p = 31
    CHECK(neighbors(origin_vertex(), Int(31)).size() == 32);
    // tree symmetry: neighbors of a neighbor contain the origin
    for (const auto& w : nb) {
        auto back = neighbors(w, p);
        bool found = false;
        for (const auto& u : back)
            if (u == origin_vertex()) found = true;
        CHECK(found);
    }
    // neighbors pairwise distinct
    for (std::size_t i = 0; i < nb.size(); ++i)
        for (std::size_t j = i + 1; j < nb.size(); ++j) CHECK(!(nb[i] == nb[j]));
}

TEST_CASE("edges basics") {
    Int p(3);
    auto edges = edges_leaving(origin_vertex(), p);
    REQUIRE(edges.size() == 4);
    // identity edge: source v0, target diag(p,1)-class
    EdgeRep id_edge{origin_vertex(), 3};  // k = p is the diag direction
    CHECK(source(id_edge) == origin_vertex());
    CHECK(target(id_edge, p) == (VertexRep{1, 0, Int(0)}));
    // targets of edges_leaving = neighbors
    auto nb = neighbors(origin_vertex(), p);
    std::vector<VertexRep> tg;
    for (const auto& e : edges) tg.push_back(target(e, p));
    std::sort(tg.begin(), tg.end());
    std::sort(nb.begin(), nb.end());
    CHECK(tg == nb);
}

TEST_CASE("reverse involution") {
    Rng rng(7);
    Int p(3);
    for (int t = 0; t < 100; ++t) {
        TreeMat m{Int(rng.next_signed(-30, 30)), Int(rng.next_signed(-30, 30)),
                  Int(rng.next_signed(-30, 30)), Int(rng.next_signed(-30, 30))};
        if (tree_det(m) == 0) continue;
        EdgeRep e = normalize_edge(m, p);
        EdgeRep r = reverse(e, p);
        CHECK(source(r) == target(e, p));
        CHECK(target(r, p) == source(e));
        CHECK(reverse(r, p) == e);
    }
}

TEST_CASE("normalize_edge invariance under Gamma0") {
    Rng rng(11);
    Int p(5);
    for (int t = 0; t < 60; ++t) {
        TreeMat m{Int(rng.next_signed(-20, 20)), Int(rng.next_signed(-20, 20)),
                  Int(rng.next_signed(-20, 20)), Int(rng.next_signed(-20, 20))};
        if (tree_det(m) == 0) continue;
        EdgeRep e = normalize_edge(m, p);
        TreeMat g = random_gamma0(rng, p);
        CHECK(normalize_edge(tree_mul(m, g), p) == e);
        // scalar invariance
        TreeMat pm{p, Int(0), Int(0), p};
        CHECK(normalize_edge(tree_mul(m, pm), p) == e);
    }
}

TEST_CASE("distance") {
    Int p(2);
    CHECK(tree_distance(origin_vertex(), origin_vertex(), p) == 0);
    VertexRep d2 = normalize_vertex(TreeMat{Int(4), Int(0), Int(0), Int(1)}, p);
    CHECK(tree_distance(origin_vertex(), d2, p) == 2);
    // additivity along a non-backtracking walk
    Rng rng(5);
    for (long pp : {2, 5}) {
        Int pr(pp);
        VertexRep prev = origin_vertex();
        VertexRep cur = neighbors(prev, pr)[0];
        unsigned long d = 1;
        for (int step = 0; step < 12; ++step) {
            auto nb = neighbors(cur, pr);
            // pick any neighbor that does not backtrack
            VertexRep next = nb[0] == prev ? nb[1] : nb[0];
            std::size_t pick = rng.next(nb.size());
            if (!(nb[pick] == prev)) next = nb[pick];
            prev = cur;
            cur = next;
            ++d;
            CHECK(tree_distance(origin_vertex(), cur, pr) == d);
        }
    }
}

TEST_CASE("distance parity equals detval parity") {
    Rng rng(13);
    Int p(3);
    for (int t = 0; t < 50; ++t) {
        TreeMat m{Int(rng.next_signed(-40, 40)), Int(rng.next_signed(-40, 40)),
                  Int(rng.next_signed(-40, 40)), Int(rng.next_signed(-40, 40))};
        if (tree_det(m) == 0) continue;
        VertexRep v = normalize_vertex(m, p);
        CHECK(tree_distance(origin_vertex(), v, p) % 2 == v.detval() % 2);
        CHECK(tree_distance(origin_vertex(), v, p) == v.detval());
    }
}

TEST_CASE("matrix text form") {
    TreeMat m = parse_tree_matrix("[[1,-2],[0,31]]");
    CHECK(m[0] == 1);
    CHECK(m[1] == -2);
    CHECK(m[2] == 0);
    CHECK(m[3] == 31);
    CHECK(tree_matrix_str(m) == "[[1,-2],[0,31]]");
    CHECK_THROWS(parse_tree_matrix("[1,2,3]"));
}
