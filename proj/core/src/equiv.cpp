#include "btq/equiv.hpp"

#include <algorithm>

#include "btq/padic.hpp"

namespace btq {

bool GroupElement::is_identity() const { return t == 0; }

ZVec EquivContext::rmax_coords(const ZVec& order_coords) const {
    std::size_t m = r_in_rmax.size();
    ZVec out(m, Int(0));
    for (std::size_t i = 0; i < m; ++i) {
        if (order_coords[i] == 0) continue;
        for (std::size_t j = 0; j < m; ++j) out[j] += order_coords[i] * r_in_rmax[i][j];
    }
    return out;
}

Quaternion EquivContext::quat_of(const GroupElement& g) const { return order->element(g.lam); }

Mat2z EquivContext::lam_matrix(const ZVec& order_coords, unsigned long N) const {
    ZVec rc = rmax_coords(order_coords);
    if (N <= iota.n_cap) return iota.embed(rc, N);
    if (N > hi_cap) {
        unsigned long cap = std::max(2 * iota.n_cap, N + 8);
        iota_hi = build_splitting(*order->A, *rmax, site, cap);
        hi_cap = cap;
    }
    return iota_hi.embed(rc, N);
}

const FieldElement& EquivContext::inv_delta_sq(unsigned c) const {
    auto it = delta_pow_inv.find(c);
    if (it != delta_pow_inv.end()) return it->second;
    FieldElement d2 = site.delta * site.delta;
    FieldElement acc = site.K->one();
    for (unsigned i = 0; i < c; ++i) acc = acc * d2;
    auto [pos, ok] = delta_pow_inv.emplace(c, acc.inverse());
    (void)ok;
    return pos->second;
}

EquivContext make_equiv_context(const QuatOrder& order, const QuatOrder& rmax,
                                const PrimeSite& site, SplittingMap iota) {
    check(site.d > 0, "make_equiv_context: site must be principalized");
    EquivContext ctx;
    ctx.order = &order;
    ctx.rmax = &rmax;
    ctx.site = site;
    ctx.iota = std::move(iota);
    for (const auto& e : order.zbasis) ctx.r_in_rmax.push_back(rmax.coords(e));
    return ctx;
}

GroupElement group_identity(const EquivContext& ctx) {
    return GroupElement{ctx.order->coords(quat_one(*ctx.order->A)), 0};
}

GroupElement group_mul(const EquivContext& ctx, const GroupElement& a, const GroupElement& b) {
    Quaternion prod = ctx.quat_of(a) * ctx.quat_of(b);
    return GroupElement{ctx.order->coords(prod), a.t + b.t};
}

GroupElement group_inverse(const EquivContext& ctx, const GroupElement& g) {
    // nrd(lam) = delta^{2t}, so conj(lam)/delta^t inverts it
    return GroupElement{ctx.order->coords(ctx.quat_of(g).conj()), g.t};
}

namespace {

TreeMat lift_mat(const Mat2z& m) { return TreeMat{m.m[0], m.m[1], m.m[2], m.m[3]}; }

TreeMat action_matrix(const EquivContext& ctx, const GroupElement& g,
                      unsigned long rep_detval) {
    unsigned long nrd_val = 2ul * g.t * ctx.site.d;
    unsigned long need = nrd_val + rep_detval + 2;
    return lift_mat(ctx.lam_matrix(g.lam, need));
}

}  // namespace

VertexRep act(const EquivContext& ctx, const GroupElement& g, const VertexRep& v) {
    TreeMat gm = action_matrix(ctx, g, v.detval());
    return normalize_vertex(tree_mul(gm, v.matrix(ctx.site.p)), ctx.site.p);
}

EdgeRep act(const EquivContext& ctx, const GroupElement& g, const EdgeRep& e) {
    TreeMat gm = action_matrix(ctx, g, e.src.detval());
    return normalize_edge(tree_mul(gm, e.matrix(ctx.site.p)), ctx.site.p);
}

ZMat hom_lattice(const EquivContext& ctx, const TreeMat& u, const TreeMat& v, bool edge_mode,
                 unsigned m) {
    ++ctx.stats.lattice_builds;
    const Int& p = ctx.site.p;
    const unsigned d = ctx.site.d;
    const unsigned c = (m + d - 1) / d;
    const unsigned h = d * c - m;
    const unsigned long N = 2ul * d * c + 1;
    const Int pn = pow_int(p, N);
    const std::size_t rank = ctx.order->rank();

    // L: splitting images of the order basis, flattened mod p^N
    ZMat l(rank, ZVec(4));
    for (std::size_t k = 0; k < rank; ++k) {
        ZVec unit(rank, Int(0));
        unit[k] = 1;
        Mat2z img = ctx.lam_matrix(unit, N);
        for (int t = 0; t < 4; ++t) l[k][t] = img.m[t];
    }

    // Z: rows p^h * v * B * adj(u) over the basis of Lambda_0 (elements g
    // with g u in v F^x G have the shape v h u^{-1}); edge mode uses
    // M_0(p O) whose lower-left basis element carries a p
    TreeMat uadj = tree_adj(u);
    Int ph = pow_int(p, h);
    std::vector<TreeMat> basis0 = {
        TreeMat{Int(1), Int(0), Int(0), Int(0)}, TreeMat{Int(0), Int(1), Int(0), Int(0)},
        TreeMat{Int(0), Int(0), edge_mode ? p : Int(1), Int(0)},
        TreeMat{Int(0), Int(0), Int(0), Int(1)}};
    ZMat stacked = l;
    for (const auto& b : basis0) {
        TreeMat w = tree_mul(tree_mul(v, b), uadj);
        ZVec row(4);
        for (int t = 0; t < 4; ++t) row[t] = mod_pos(-w[t] * ph, pn);
        stacked.push_back(std::move(row));
    }

    // kernel rows (x | y) with x L = y Z mod p^N; keep the x part
    ZMat kernel = howell_left_kernel_z(p, N, stacked);
    ZMat rows;
    for (const auto& krow : kernel) rows.push_back(ZVec(krow.begin(), krow.begin() + rank));

    // + p^{dc+1} R over the order basis
    {
        const NumberField& K = *ctx.site.K;
        PrimeIdeal q = prime_of_site(ctx.site);
        ZMat ideal = ideal_power_lattice(q, d * c + 1);
        for (const auto& arow : ideal) {
            QVec ac(K.degree);
            for (unsigned i = 0; i < K.degree; ++i) ac[i] = Rat(arow[i]);
            FieldElement alpha = K.element(ac);
            for (std::size_t k = 0; k < rank; ++k)
                rows.push_back(ctx.order->coords(ctx.order->zbasis[k].scaled(alpha)));
        }
    }
    return hnf(std::move(rows));
}

namespace {

std::optional<GroupElement> equivalent_impl(const EquivContext& ctx, const TreeMat& umat,
                                            const TreeMat& vmat, bool edge_mode,
                                            unsigned long uval, unsigned long vval,
                                            bool naive) {
    ++ctx.stats.queries;
    if ((uval + vval) % 2 != 0) {
        ++ctx.stats.parity_skips;
        return std::nullopt;
    }
    const unsigned m = static_cast<unsigned>((uval + vval) / 2);
    const unsigned d = ctx.site.d;
    const unsigned c = (m + d - 1) / d;
    const Int& p = ctx.site.p;
    const NumberField& K = *ctx.site.K;
    const unsigned n = K.degree;
    const std::size_t rank = ctx.order->rank();

    ZMat lattice;
    if (naive) {
        lattice.assign(rank, ZVec(rank, Int(0)));
        for (std::size_t i = 0; i < rank; ++i) lattice[i][i] = 1;
    } else {
        lattice = hom_lattice(ctx, umat, vmat, edge_mode, m);
    }

    // scaled form: value of a reduced-norm delta^{2c} element is 2 [F:Q]
    const FieldElement& scale = ctx.inv_delta_sq(c);
    GramForm gram{QMat(rank, QVec(rank))};
    for (std::size_t i = 0; i < rank; ++i)
        for (std::size_t j = 0; j < rank; ++j)
            gram.g[i][j] = (ctx.order->gram_trd[i][j] * scale).trace();

    ++ctx.stats.enumerations;
    auto cands = short_vectors(lattice, gram, Rat(2 * static_cast<long>(n)));

    FieldElement target = K.one();
    for (unsigned i = 0; i < c; ++i) target = target * (ctx.site.delta * ctx.site.delta);

    for (const auto& coords : cands) {
        Quaternion lam = ctx.order->element(coords);
        // candidates mixing in the p^{dc+1}R tail can carry a different
        // norm (their norm valuation can drop to 2dc - m + 1); only the
        // exact norm yields group elements, and the action check below
        // discards tail-contaminated elements that move u elsewhere
        if (!(lam.nrd() == target)) continue;
        GroupElement g{coords, c};
        unsigned long need = 2ul * d * c + std::max(uval, vval) + 2;
        TreeMat gm = lift_mat(ctx.lam_matrix(coords, need));
        if (edge_mode) {
            if (normalize_edge(tree_mul(gm, umat), p) == normalize_edge(vmat, p)) return g;
        } else {
            if (normalize_vertex(tree_mul(gm, umat), p) == normalize_vertex(vmat, p)) return g;
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<GroupElement> is_equivalent(const EquivContext& ctx, const VertexRep& u,
                                          const VertexRep& v) {
    return equivalent_impl(ctx, u.matrix(ctx.site.p), v.matrix(ctx.site.p), false, u.detval(),
                           v.detval(), false);
}

std::optional<GroupElement> is_equivalent(const EquivContext& ctx, const EdgeRep& u,
                                          const EdgeRep& v) {
    return equivalent_impl(ctx, u.matrix(ctx.site.p), v.matrix(ctx.site.p), true,
                           u.src.detval(), v.src.detval(), false);
}

std::optional<GroupElement> naive_equivalent(const EquivContext& ctx, const VertexRep& u,
                                             const VertexRep& v) {
    return equivalent_impl(ctx, u.matrix(ctx.site.p), v.matrix(ctx.site.p), false, u.detval(),
                           v.detval(), true);
}

std::optional<GroupElement> naive_equivalent(const EquivContext& ctx, const EdgeRep& u,
                                             const EdgeRep& v) {
    return equivalent_impl(ctx, u.matrix(ctx.site.p), v.matrix(ctx.site.p), true,
                           u.src.detval(), v.src.detval(), true);
}

}  // namespace btq
