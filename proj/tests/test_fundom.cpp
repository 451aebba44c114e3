#include "doctest.h"

#include "btq/pipeline.hpp"
#include "fields_fixture.hpp"

using namespace btq;

namespace {

std::unique_ptr<ProblemSetup> hamilton_setup(const NumberField& K, long p) {
    auto q2 = primes_above(K, Int(2));
    Ideal n2 = ideal_from_prime(q2[0]);
    auto sites = split_prime(K, Int(p));
    return setup_problem(K, n2, Ideal{}, sites[0]);
}

VertexRep random_vertex(Rng& rng, const Int& p, unsigned dist) {
    VertexRep prev = origin_vertex(), cur = origin_vertex();
    for (unsigned i = 0; i < dist; ++i) {
        auto nb = neighbors(cur, p);
        VertexRep next;
        do {
            next = nb[rng.next(nb.size())];
        } while (i > 0 && next == prev);
        prev = cur;
        cur = next;
    }
    return cur;
}

void check_graph_invariants(const EquivContext& ctx, const QuotientGraph& g) {
    // beta = E - V + 1
    CHECK(g.genus + g.vertices.size() == g.edges.size() + 1);
    // vertex degree <= N(p)+1 trivially by construction; edges connect
    // opposite parities
    for (const auto& e : g.edges) {
        unsigned long sp = source(e).detval() % 2;
        unsigned long tp = target(e, g.p).detval() % 2;
        CHECK(sp != tp);
    }
    // no stored edge is equivalent to its own reverse
    for (const auto& e : g.edges) CHECK(!is_equivalent(ctx, e, reverse(e, g.p)).has_value());
    // pairwise inequivalence of stored vertices and edges
    for (std::size_t i = 0; i < g.vertices.size(); ++i)
        for (std::size_t j = i + 1; j < g.vertices.size(); ++j)
            CHECK(!is_equivalent(ctx, g.vertices[i], g.vertices[j]).has_value());
    for (std::size_t i = 0; i < g.edges.size(); ++i)
        for (std::size_t j = i + 1; j < g.edges.size(); ++j) {
            CHECK(!is_equivalent(ctx, g.edges[i], g.edges[j]).has_value());
            CHECK(!is_equivalent(ctx, g.edges[i], reverse(g.edges[j], g.p)).has_value());
        }
    // every pairing element maps its key onto the recorded target
    for (const auto& [outer, pr] : g.edge_pairings) {
        EdgeRep expect = g.edges[pr.index];
        if (pr.reversed) expect = reverse(expect, g.p);
        CHECK(act(ctx, pr.g, outer) == expect);
    }
    for (const auto& [outer, pr] : g.vertex_pairings)
        CHECK(act(ctx, pr.g, outer) == g.vertices[pr.index]);
}

}  // namespace

TEST_CASE("hamilton p=5 fundamental domain") {
    auto K = make_Q();
    auto ps = hamilton_setup(*K, 5);
    auto res = fundamental_domain(ps->ctx);
    REQUIRE(!res.limit_exceeded);
    QuotientGraph& g = res.graph;
    check_graph_invariants(ps->ctx, g);
    // disc 2, p = 5: the classical quotient is a single undirected edge
    // pair with genus 0 (mass 1/24 forces a tiny graph)
    CHECK(g.genus == 0);
    CHECK(g.vertices.size() == g.edges.size() + 1);

    boundary_data(ps->ctx, g);
    // boundary size = sum over vertices of (N(p)+1 - within-domain degree)
    std::size_t expected = 0;
    for (const auto& v : g.vertices) {
        std::size_t indomain = 0;
        for (const auto& e : edges_leaving(v, g.p))
            if (g.has_undirected(ps->ctx, e)) ++indomain;
        expected += (5 + 1) - indomain;
    }
    CHECK(g.boundary.size() == expected);
}

TEST_CASE("early exit on max_genus") {
    auto K = make_Q();
    auto ps = hamilton_setup(*K, 13);
    auto full = fundamental_domain(ps->ctx);
    REQUIRE(!full.limit_exceeded);
    if (full.graph.genus > 0) {
        auto limited = fundamental_domain(ps->ctx, 0);
        CHECK(limited.limit_exceeded);
    }
    check_graph_invariants(ps->ctx, full.graph);
}

TEST_CASE("reduce_edge lands in the domain") {
    auto K = make_Q();
    auto ps = hamilton_setup(*K, 5);
    auto res = fundamental_domain(ps->ctx);
    boundary_data(ps->ctx, res.graph);
    const QuotientGraph& g = res.graph;
    Rng rng(5);
    for (int t = 0; t < 40; ++t) {
        unsigned dist = static_cast<unsigned>(rng.next(8));
        EdgeRep e{random_vertex(rng, g.p, dist), static_cast<unsigned long>(rng.next(6))};
        std::uint64_t lookups = 0;
        auto [red, gamma] = reduce_edge(ps->ctx, g, e, &lookups);
        CHECK(g.has_undirected(ps->ctx, red));
        CHECK(act(ps->ctx, gamma, e) == red);
        // the reduced edge is equivalent to the input
        auto w = is_equivalent(ps->ctx, e, red);
        CHECK(w.has_value());
        CHECK(lookups <= (5 + 1) * (dist + 1));
    }
}

TEST_CASE("reduce_vertex lands in the domain") {
    auto K = make_Q();
    auto ps = hamilton_setup(*K, 5);
    auto res = fundamental_domain(ps->ctx);
    boundary_data(ps->ctx, res.graph);
    const QuotientGraph& g = res.graph;
    Rng rng(6);
    for (int t = 0; t < 30; ++t) {
        VertexRep v = random_vertex(rng, g.p, static_cast<unsigned>(rng.next(9)));
        auto [red, gamma] = reduce_vertex(ps->ctx, g, v);
        CHECK(g.vertex_index.count(red) == 1);
        CHECK(act(ps->ctx, gamma, v) == red);
    }
}

TEST_CASE("roundtrip through recorded pairings") {
    auto K = make_Q();
    auto ps = hamilton_setup(*K, 13);
    auto res = fundamental_domain(ps->ctx);
    boundary_data(ps->ctx, res.graph);
    const QuotientGraph& g = res.graph;
    REQUIRE(!g.edge_pairings.empty());
    std::vector<GroupElement> gens;
    for (const auto& [e, pr] : g.edge_pairings)
        if (pr.g.t > 0) gens.push_back(pr.g);
    if (gens.empty())
        for (const auto& [e, pr] : g.vertex_pairings)
            if (pr.g.t > 0) gens.push_back(pr.g);
    REQUIRE(!gens.empty());
    Rng rng(9);
    for (int t = 0; t < 10; ++t) {
        EdgeRep base = g.edges[rng.next(g.edges.size())];
        GroupElement w = gens[rng.next(gens.size())];
        for (unsigned j = 0; j < rng.next(3); ++j)
            w = group_mul(ps->ctx, w, gens[rng.next(gens.size())]);
        EdgeRep moved = act(ps->ctx, group_inverse(ps->ctx, w), base);
        auto [red, gamma] = reduce_edge(ps->ctx, g, moved);
        CHECK(g.has_undirected(ps->ctx, red));
        auto eq = is_equivalent(ps->ctx, moved, base);
        CHECK(eq.has_value());
    }
}

TEST_CASE("quotient covers the tree") {
    auto K = make_Q();
    auto ps = hamilton_setup(*K, 5);
    auto res = fundamental_domain(ps->ctx);
    boundary_data(ps->ctx, res.graph);
    Rng rng(12);
    for (int t = 0; t < 25; ++t) {
        EdgeRep e{random_vertex(rng, res.graph.p, static_cast<unsigned>(rng.next(10))),
                  static_cast<unsigned long>(rng.next(6))};
        auto [red, gamma] = reduce_edge(ps->ctx, res.graph, e);
        CHECK(res.graph.has_undirected(ps->ctx, red));
    }
}
