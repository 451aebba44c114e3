#ifndef BTQ_BTTREE_HPP
#define BTQ_BTTREE_HPP

#include <array>
#include <string>
#include <vector>

#include "btq/util.hpp"

namespace btq {

// 2x2 integer matrix, row major.
using TreeMat = std::array<Int, 4>;

TreeMat tree_mul(const TreeMat& x, const TreeMat& y);
TreeMat tree_adj(const TreeMat& x);  // adjugate
Int tree_det(const TreeMat& x);

// Canonical vertex of the Bruhat-Tits tree at p: the homothety class of
// the column lattice, written [[p^m, 0], [r, p^n]] with 0 <= r < p^n and
// min(m, n, v_p(r)) = 0.
struct VertexRep {
    unsigned long m = 0, n = 0;
    Int r = 0;

    bool operator==(const VertexRep& o) const { return m == o.m && n == o.n && r == o.r; }
    bool operator<(const VertexRep& o) const {
        if (m != o.m) return m < o.m;
        if (n != o.n) return n < o.n;
        return r < o.r;
    }
    unsigned long detval() const { return m + n; }  // = distance to origin
    TreeMat matrix(const Int& p) const;
    std::string str() const;
};

// Directed edge: source vertex plus direction index k. k in [0, p) selects
// the neighbor through [[0,1],[1,k]]; k = p is the diag(p,1) direction.
struct EdgeRep {
    VertexRep src;
    unsigned long k = 0;

    bool operator==(const EdgeRep& o) const { return src == o.src && k == o.k; }
    bool operator<(const EdgeRep& o) const {
        if (!(src == o.src)) return src < o.src;
        return k < o.k;
    }
    TreeMat matrix(const Int& p) const;  // integer matrix representing the edge
    std::string str() const;
};

VertexRep origin_vertex();

VertexRep normalize_vertex(const TreeMat& m, const Int& p);
EdgeRep normalize_edge(const TreeMat& m, const Int& p);

std::vector<VertexRep> neighbors(const VertexRep& v, const Int& p);
std::vector<EdgeRep> edges_leaving(const VertexRep& v, const Int& p);

VertexRep source(const EdgeRep& e);
VertexRep target(const EdgeRep& e, const Int& p);
EdgeRep reverse(const EdgeRep& e, const Int& p);

unsigned long tree_distance(const VertexRep& u, const VertexRep& v, const Int& p);

// Parse "[[a,b],[c,d]]" (whitespace tolerant).
TreeMat parse_tree_matrix(const std::string& text);
std::string tree_matrix_str(const TreeMat& m);

}  // namespace btq

#endif
