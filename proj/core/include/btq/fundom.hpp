#ifndef BTQ_FUNDOM_HPP
#define BTQ_FUNDOM_HPP

#include "btq/equiv.hpp"

namespace btq {

// Pairing of an out-of-domain element with its representative in the
// domain: act(g, outer) lands on the stored element (or its reverse, for
// edges, when `reversed` is set).
struct Pairing {
    std::size_t index = 0;  // position in the domain list
    bool reversed = false;
    GroupElement g;
};

struct QuotientGraph {
    Int p;  // N(site)
    std::vector<VertexRep> vertices;
    std::vector<EdgeRep> edges;  // one orientation per quotient edge
    std::map<VertexRep, Pairing> vertex_pairings;
    std::map<EdgeRep, Pairing> edge_pairings;  // every rejected leaving edge
    std::map<EdgeRep, Pairing> boundary;       // the out-of-domain layer
    unsigned genus = 0;
    std::uint64_t equiv_calls = 0;
    double time_ms = 0;

    std::map<VertexRep, std::size_t> vertex_index;
    std::map<EdgeRep, std::size_t> edge_index;

    bool has_edge(const EdgeRep& e) const { return edge_index.count(e) != 0; }
    // membership of the undirected edge through e
    bool has_undirected(const EquivContext& ctx, const EdgeRep& e) const;
};

struct FundomResult {
    bool limit_exceeded = false;
    QuotientGraph graph;
};

// Algorithm 2: BFS from the origin, testing each leaving edge against the
// accepted edges (both orientations) and each new target vertex against
// the accepted vertices. Genus counts vertex identifications; boundary
// data is filled afterwards by boundary_data().
FundomResult fundamental_domain(const EquivContext& ctx,
                                std::optional<unsigned> max_genus = std::nullopt,
                                bool use_naive_oracle = false);

// Store a (domain edge, group element) pair for every leaving edge that is
// not itself in the domain, and verify each entry.
void boundary_data(const EquivContext& ctx, QuotientGraph& g);

// Reduce an arbitrary edge/vertex into the domain by walking the path from
// the origin and applying stored pairings; returns the domain element and
// the group element realizing it. lookups counts pairing-table queries.
std::pair<EdgeRep, GroupElement> reduce_edge(const EquivContext& ctx, const QuotientGraph& g,
                                             EdgeRep e, std::uint64_t* lookups = nullptr);
std::pair<VertexRep, GroupElement> reduce_vertex(const EquivContext& ctx,
                                                 const QuotientGraph& g, VertexRep v,
                                                 std::uint64_t* lookups = nullptr);

}  // namespace btq

#endif
