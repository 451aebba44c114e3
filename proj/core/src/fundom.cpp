#include "btq/fundom.hpp"

#include <chrono>
#include <set>

namespace btq {

bool QuotientGraph::has_undirected(const EquivContext& ctx, const EdgeRep& e) const {
    if (edge_index.count(e)) return true;
    return edge_index.count(reverse(e, ctx.site.p)) != 0;
}

namespace {

// cheap necessary conditions before running the lattice machinery
bool vertex_prefilter(const VertexRep& a, const VertexRep& b) {
    return (a.detval() + b.detval()) % 2 == 0;
}

bool edge_prefilter(const EdgeRep& a, const EdgeRep& b) {
    return (a.src.detval() + b.src.detval()) % 2 == 0;
}

}  // namespace

FundomResult fundamental_domain(const EquivContext& ctx, std::optional<unsigned> max_genus,
                                bool use_naive_oracle) {
    auto equiv_edge = [&](const EdgeRep& a, const EdgeRep& b) {
        return use_naive_oracle ? naive_equivalent(ctx, a, b) : is_equivalent(ctx, a, b);
    };
    auto equiv_vertex = [&](const VertexRep& a, const VertexRep& b) {
        return use_naive_oracle ? naive_equivalent(ctx, a, b) : is_equivalent(ctx, a, b);
    };
    auto t0 = std::chrono::steady_clock::now();
    const Int& p = ctx.site.p;
    FundomResult res;
    QuotientGraph& g = res.graph;
    g.p = p;
    std::uint64_t calls0 = ctx.stats.queries;

    // pending vertices ordered by (distance, canonical form)
    std::set<std::pair<unsigned long, VertexRep>> pending;
    VertexRep v0 = origin_vertex();
    g.vertices.push_back(v0);
    g.vertex_index[v0] = 0;
    pending.insert({0, v0});

    while (!pending.empty()) {
        VertexRep v = pending.begin()->second;
        pending.erase(pending.begin());
        for (const EdgeRep& e : edges_leaving(v, p)) {
            // equivalent to an accepted edge (either orientation)?
            bool matched = false;
            EdgeRep erev = reverse(e, p);
            for (std::size_t idx = 0; idx < g.edges.size() && !matched; ++idx) {
                const EdgeRep& known = g.edges[idx];
                // exact hits first
                if (e == known) {
                    matched = true;
                    g.edge_pairings.emplace(e, Pairing{idx, false, group_identity(ctx)});
                    break;
                }
                if (erev == known) {
                    matched = true;
                    g.edge_pairings.emplace(e, Pairing{idx, true, group_identity(ctx)});
                    break;
                }
                EdgeRep krev = reverse(known, p);
                if (edge_prefilter(e, known)) {
                    if (auto w = equiv_edge(e, known)) {
                        matched = true;
                        g.edge_pairings.emplace(e, Pairing{idx, false, std::move(*w)});
                        break;
                    }
                }
                if (edge_prefilter(e, krev)) {
                    if (auto w = equiv_edge(e, krev)) {
                        matched = true;
                        g.edge_pairings.emplace(e, Pairing{idx, true, std::move(*w)});
                        break;
                    }
                }
            }
            if (matched) continue;

            std::size_t eidx = g.edges.size();
            g.edges.push_back(e);
            g.edge_index[e] = eidx;

            VertexRep vt = target(e, p);
            bool vmatched = false;
            if (auto it = g.vertex_index.find(vt); it != g.vertex_index.end()) {
                // exact repeat of a domain vertex closes a cycle too
                g.vertex_pairings.emplace(vt, Pairing{it->second, false, group_identity(ctx)});
                vmatched = true;
            }
            for (std::size_t idx = 0; idx < g.vertices.size() && !vmatched; ++idx) {
                if (!vertex_prefilter(vt, g.vertices[idx])) continue;
                if (auto w = equiv_vertex(vt, g.vertices[idx])) {
                    g.vertex_pairings.emplace(vt, Pairing{idx, false, std::move(*w)});
                    vmatched = true;
                }
            }
            if (!vmatched) {
                g.vertex_index[vt] = g.vertices.size();
                g.vertices.push_back(vt);
                pending.insert({vt.detval(), vt});
            } else {
                ++g.genus;
                if (max_genus && g.genus > *max_genus) {
                    res.limit_exceeded = true;
                    g.equiv_calls = ctx.stats.queries - calls0;
                    g.time_ms = std::chrono::duration<double, std::milli>(
                                    std::chrono::steady_clock::now() - t0)
                                    .count();
                    return res;
                }
            }
        }
    }
    check(g.genus + g.vertices.size() == g.edges.size() + 1,
          "fundamental_domain: genus bookkeeping mismatch (beta != E - V + 1)");
    g.equiv_calls = ctx.stats.queries - calls0;
    g.time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    return res;
}

void boundary_data(const EquivContext& ctx, QuotientGraph& g) {
    const Int& p = ctx.site.p;
    for (const auto& v : g.vertices) {
        for (const EdgeRep& e : edges_leaving(v, p)) {
            if (g.has_undirected(ctx, e)) continue;
            auto it = g.edge_pairings.find(e);
            check(it != g.edge_pairings.end(),
                  "boundary_data: leaving edge was never classified");
            const Pairing& pr = it->second;
            // verify: act(g, e) must land on the stored edge (or reverse)
            EdgeRep landed = act(ctx, pr.g, e);
            EdgeRep expect = g.edges[pr.index];
            if (pr.reversed) expect = reverse(expect, p);
            check(landed == expect, "boundary_data: pairing failed verification");
            g.boundary.emplace(e, pr);
        }
    }
}

namespace {

// neighbor of w one step closer to the origin
VertexRep parent_vertex(const VertexRep& w, const Int& p) {
    unsigned long dw = w.detval();
    check(dw > 0, "parent of the origin");
    for (const auto& nb : neighbors(w, p))
        if (nb.detval() == dw - 1) return nb;
    throw error("parent_vertex: no closer neighbor (tree corrupted)");
}

// directed edge from a to its neighbor b
EdgeRep edge_between(const VertexRep& a, const VertexRep& b, const Int& p) {
    for (const EdgeRep& e : edges_leaving(a, p))
        if (target(e, p) == b) return e;
    throw error("edge_between: vertices not adjacent");
}

}  // namespace

std::pair<EdgeRep, GroupElement> reduce_edge(const EquivContext& ctx, const QuotientGraph& g,
                                             EdgeRep e, std::uint64_t* lookups) {
    const Int& p = ctx.site.p;
    GroupElement acc = group_identity(ctx);
    unsigned long start_dist = source(e).detval() + 1;
    std::uint64_t budget = (mpz_get_ui(p.get_mpz_t()) + 1) * (start_dist + 4) + 64;
    std::uint64_t used = 0;
    while (true) {
        check(used <= budget, "reduce_edge: lookup budget exceeded (reduction stuck)");
        if (g.has_undirected(ctx, e)) break;
        // build the vertex chain v0 ... src(e)
        std::vector<VertexRep> chain{source(e)};
        while (chain.back().detval() > 0) chain.push_back(parent_vertex(chain.back(), p));
        std::reverse(chain.begin(), chain.end());
        bool applied = false;
        for (std::size_t i = 0; i < chain.size() && !applied; ++i) {
            EdgeRep f =
                (i + 1 < chain.size()) ? edge_between(chain[i], chain[i + 1], p) : e;
            if (g.has_undirected(ctx, f)) {
                // stay inside the domain as long as the walk allows; hop
                // through a vertex pairing if the far endpoint left it
                VertexRep x = target(f, p);
                if (i + 1 < chain.size() && !g.vertex_index.count(x)) {
                    auto it = g.vertex_pairings.find(x);
                    check(it != g.vertex_pairings.end(),
                          "reduce_edge: unclassified vertex on a domain edge");
                    ++used;
                    if (lookups) ++*lookups;
                    e = act(ctx, it->second.g, e);
                    acc = group_mul(ctx, it->second.g, acc);
                    applied = true;
                }
                continue;
            }
            // first out-of-domain edge: its source is a domain vertex
            auto it = g.boundary.find(f);
            check(it != g.boundary.end(), "reduce_edge: missing boundary entry");
            ++used;
            if (lookups) ++*lookups;
            e = act(ctx, it->second.g, e);
            acc = group_mul(ctx, it->second.g, acc);
            applied = true;
        }
        check(applied, "reduce_edge: no progress (internal error)");
    }
    return {e, acc};
}

std::pair<VertexRep, GroupElement> reduce_vertex(const EquivContext& ctx,
                                                 const QuotientGraph& g, VertexRep v,
                                                 std::uint64_t* lookups) {
    const Int& p = ctx.site.p;
    if (g.vertex_index.count(v)) return {v, group_identity(ctx)};
    EdgeRep e = edge_between(parent_vertex(v, p), v, p);
    auto [ered, acc] = reduce_edge(ctx, g, e, lookups);
    VertexRep moved = act(ctx, acc, v);  // = target of the reduced edge
    if (g.vertex_index.count(moved)) return {moved, acc};
    auto it = g.vertex_pairings.find(moved);
    check(it != g.vertex_pairings.end(), "reduce_vertex: target not classified");
    if (lookups) ++*lookups;
    GroupElement total = group_mul(ctx, it->second.g, acc);
    return {g.vertices[it->second.index], total};
    (void)ered;
}

}  // namespace btq
