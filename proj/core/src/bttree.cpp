#include "btq/bttree.hpp"

#include <sstream>

#include "btq/lattice.hpp"

namespace btq {

TreeMat tree_mul(const TreeMat& x, const TreeMat& y) {
    return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
            x[2] * y[1] + x[3] * y[3]};
}

TreeMat tree_adj(const TreeMat& x) { return {x[3], -x[1], -x[2], x[0]}; }

Int tree_det(const TreeMat& x) { return x[0] * x[3] - x[1] * x[2]; }

TreeMat VertexRep::matrix(const Int& p) const {
    return {pow_int(p, m), Int(0), r, pow_int(p, n)};
}

std::string VertexRep::str() const {
    std::ostringstream os;
    os << "v(m=" << m << ",n=" << n << ",r=" << r.get_str() << ")";
    return os.str();
}

TreeMat EdgeRep::matrix(const Int& p) const {
    TreeMat v = src.matrix(p);
    if (k == static_cast<unsigned long>(p.get_ui())) {
        TreeMat swap{Int(0), Int(1), Int(1), Int(0)};
        return tree_mul(v, swap);
    }
    TreeMat u{Int(1), Int(0), Int(k), Int(1)};
    return tree_mul(v, u);
}

std::string EdgeRep::str() const {
    std::ostringstream os;
    os << "e(" << src.str() << ",k=" << k << ")";
    return os.str();
}

VertexRep origin_vertex() { return VertexRep{}; }

VertexRep normalize_vertex(const TreeMat& mat, const Int& p) {
    Int det = tree_det(mat);
    check(det != 0, "normalize_vertex: singular matrix");
    unsigned long vdet = valuation(det, p);
    Int pk = pow_int(p, vdet + 1);
    // Z_p-column span of mat equals the Z-span of its columns together
    // with p^K e_1, p^K e_2 for K > v_p(det); column HNF of that lattice
    // is the canonical lower-triangular form with p-power diagonal.
    ZMat rows = {
        {mat[0], mat[2]},  // columns of mat as row vectors
        {mat[1], mat[3]},
        {pk, Int(0)},
        {Int(0), pk},
    };
    ZMat h = hnf(std::move(rows));
    check(h.size() == 2, "normalize_vertex: rank defect");
    // h = [[A, C'], [0, D']] in row-HNF over columns (x, y); convert to the
    // column picture [[A, 0], [C, D]]: row-HNF of column-vectors-as-rows
    // gives pivots A = h[0][0], D = h[1][1], C = h[0][1].
    Int a = h[0][0], c = h[0][1], d = h[1][1];
    unsigned long m = valuation(a, p);
    unsigned long n = valuation(d, p);
    check(pow_int(p, m) == a && pow_int(p, n) == d, "normalize_vertex: non p-power pivot");
    unsigned long s = std::min(m, n);
    if (c != 0) s = std::min(s, valuation(c, p));
    if (s > 0) {
        m -= s;
        n -= s;
        c /= pow_int(p, s);
    }
    c = mod_pos(c, pow_int(p, n));
    return VertexRep{m, n, c};
}

EdgeRep normalize_edge(const TreeMat& mat, const Int& p) {
    // the edge class of M is the pair ([M], [M diag(1,p)]), both invariant
    // under the right action of the lower-left congruence group
    VertexRep v = normalize_vertex(mat, p);
    TreeMat d{Int(1), Int(0), Int(0), p};
    VertexRep tgt = normalize_vertex(tree_mul(mat, d), p);
    unsigned long pl = p.get_ui();
    for (unsigned long k = 0; k <= pl; ++k) {
        EdgeRep e{v, k};
        if (normalize_vertex(tree_mul(e.matrix(p), d), p) == tgt) return e;
    }
    throw error("normalize_edge: target is not a neighbor of the source");
}

std::vector<VertexRep> neighbors(const VertexRep& v, const Int& p) {
    std::vector<VertexRep> out;
    TreeMat m = v.matrix(p);
    unsigned long pl = p.get_ui();
    for (unsigned long r = 0; r < pl; ++r) {
        TreeMat ar{Int(1), Int(0), Int(r), p};
        out.push_back(normalize_vertex(tree_mul(m, ar), p));
    }
    TreeMat ainf{p, Int(0), Int(0), Int(1)};
    out.push_back(normalize_vertex(tree_mul(m, ainf), p));
    return out;
}

std::vector<EdgeRep> edges_leaving(const VertexRep& v, const Int& p) {
    std::vector<EdgeRep> out;
    unsigned long pl = p.get_ui();
    for (unsigned long k = 0; k <= pl; ++k) out.push_back(EdgeRep{v, k});
    return out;
}

VertexRep source(const EdgeRep& e) { return e.src; }

VertexRep target(const EdgeRep& e, const Int& p) {
    TreeMat d{Int(1), Int(0), Int(0), p};
    return normalize_vertex(tree_mul(e.matrix(p), d), p);
}

EdgeRep reverse(const EdgeRep& e, const Int& p) {
    TreeMat rev{Int(0), Int(1), p, Int(0)};
    return normalize_edge(tree_mul(e.matrix(p), rev), p);
}

unsigned long tree_distance(const VertexRep& u, const VertexRep& v, const Int& p) {
    TreeMat w = tree_mul(tree_adj(u.matrix(p)), v.matrix(p));
    Int det = tree_det(w);
    check(det != 0, "tree_distance: singular");
    unsigned long vdet = valuation(det, p);
    // content valuation
    unsigned long vc = vdet;
    for (const auto& x : w)
        if (x != 0) vc = std::min(vc, valuation(x, p));
    return vdet - 2 * vc;
}

TreeMat parse_tree_matrix(const std::string& text) {
    std::vector<Int> nums;
    std::string cur;
    for (char ch : text) {
        if (ch == '-' || (ch >= '0' && ch <= '9')) {
            cur += ch;
        } else {
            if (!cur.empty() && cur != "-") nums.emplace_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty() && cur != "-") nums.emplace_back(cur);
    check(nums.size() == 4, "matrix parse: expected 4 integers like [[a,b],[c,d]]");
    return {nums[0], nums[1], nums[2], nums[3]};
}

std::string tree_matrix_str(const TreeMat& m) {
    std::ostringstream os;
    os << "[[" << m[0].get_str() << "," << m[1].get_str() << "],[" << m[2].get_str() << ","
       << m[3].get_str() << "]]";
    return os.str();
}

}  // namespace btq
