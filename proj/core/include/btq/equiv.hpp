#ifndef BTQ_EQUIV_HPP
#define BTQ_EQUIV_HPP

#include <cstdint>
#include <map>

#include "btq/bttree.hpp"
#include "btq/quatalg.hpp"

namespace btq {

// Element of the norm-1 unit group of R[1/p]: lam / delta^t with
// nrd(lam) = delta^{2t}, lam stored by its coordinates over the Eichler
// order basis.
struct GroupElement {
    ZVec lam;
    unsigned t = 0;

    bool is_identity() const;
};

struct EquivStats {
    std::uint64_t queries = 0;
    std::uint64_t parity_skips = 0;
    std::uint64_t lattice_builds = 0;
    std::uint64_t enumerations = 0;
};

// Bundled immutable context for equivalence queries on one group.
struct EquivContext {
    const QuatOrder* order = nullptr;  // Eichler order R
    const QuatOrder* rmax = nullptr;
    PrimeSite site;                    // with d, delta filled
    SplittingMap iota;                 // images of the rmax basis
    ZMat r_in_rmax;                    // row k = rmax coords of order basis k
    ZMat p_ideal_rows_cache;           // unused placeholder for layout stability
    mutable std::map<unsigned, FieldElement> delta_pow_inv;  // 1/delta^{2c}
    mutable EquivStats stats;

    ZVec rmax_coords(const ZVec& order_coords) const;
    Quaternion quat_of(const GroupElement& g) const;
    // truncated matrix image of lam at precision N (rebuilds the splitting
    // when N exceeds the cached cap)
    Mat2z lam_matrix(const ZVec& order_coords, unsigned long N) const;
    const FieldElement& inv_delta_sq(unsigned c) const;
    mutable SplittingMap iota_hi;      // lazily built higher-precision copy
    mutable unsigned long hi_cap = 0;
};

EquivContext make_equiv_context(const QuatOrder& order, const QuatOrder& rmax,
                                const PrimeSite& site, SplittingMap iota);

GroupElement group_identity(const EquivContext& ctx);
GroupElement group_mul(const EquivContext& ctx, const GroupElement& a, const GroupElement& b);
GroupElement group_inverse(const EquivContext& ctx, const GroupElement& g);

// Left action on tree representatives.
VertexRep act(const EquivContext& ctx, const GroupElement& g, const VertexRep& v);
EdgeRep act(const EquivContext& ctx, const GroupElement& g, const EdgeRep& e);

// Gamma-equivalence of two vertices or two edges (Algorithm 1): odd
// distance returns nothing without building the lattice; otherwise short
// vectors of the hom lattice decide, and the witness is verified.
std::optional<GroupElement> is_equivalent(const EquivContext& ctx, const VertexRep& u,
                                          const VertexRep& v);
std::optional<GroupElement> is_equivalent(const EquivContext& ctx, const EdgeRep& u,
                                          const EdgeRep& v);

// Enumeration oracle: all candidates of the right reduced norm in R are
// listed from the order lattice itself. Small instances only.
std::optional<GroupElement> naive_equivalent(const EquivContext& ctx, const VertexRep& u,
                                             const VertexRep& v);
std::optional<GroupElement> naive_equivalent(const EquivContext& ctx, const EdgeRep& u,
                                             const EdgeRep& v);

// Exposed for tests: the hom lattice of a pair (rows over order coords).
ZMat hom_lattice(const EquivContext& ctx, const TreeMat& u, const TreeMat& v, bool edge_mode,
                 unsigned m);

}  // namespace btq

#endif
