#ifndef BTQ_LATTICE_HPP
#define BTQ_LATTICE_HPP

#include "btq/util.hpp"

namespace btq {

// Row-style lattices: rows of `basis` generate a sublattice of Z^m.

struct IntLattice {
    ZMat basis;  // HNF rows, zero rows dropped
    std::size_t ambient() const { return basis.empty() ? 0 : basis[0].size(); }
    std::size_t rank() const { return basis.size(); }
};

// Canonical row Hermite normal form: pivots strictly right-down, pivot
// entries positive, entries above a pivot reduced into [0, pivot).
ZMat hnf(ZMat rows);
IntLattice hnf_lattice(ZMat rows);

// HNF together with a unimodular transform U (U * input = result, with
// zero rows kept at the bottom of the correspondence).
struct HnfTransform {
    ZMat h;  // full HNF including zero rows at bottom
    ZMat u;  // square unimodular
};
HnfTransform hnf_transform(ZMat rows);

// Basis of { x : x * a = 0 } over Z.
ZMat kernel_z(const ZMat& a);

// Membership test / reduction against an HNF basis. Returns the residual
// after subtracting the unique combination; zero residual = member.
ZVec hnf_reduce(const ZMat& h, ZVec v);
bool hnf_member(const ZMat& h, const ZVec& v);

// Intersection of two row lattices in the same ambient space.
ZMat lattice_intersect(const ZMat& a, const ZMat& b);

// Integer combination of `rows` equal to `target`, if one exists.
std::optional<ZVec> solve_in_span(const ZMat& rows, const ZVec& target);

// Index [Z^m : L] = |det| for a full-rank square HNF.
Int hnf_det(const ZMat& h);

struct GramForm {
    QMat g;  // symmetric, positive definite where required
};

// Exact LLL reduction of `rows` with respect to the ambient Gram form.
// delta defaults to 99/100. The Gram may be rational; decisions are exact.
ZMat lll(ZMat rows, const GramForm& gram, const Rat& delta = Rat(99, 100));

// All nonzero lattice vectors v = x * rows with v G v^T <= bound, one of
// {v, -v} per pair, deterministically ordered by (value, lexicographic).
// Returned as ambient vectors.
std::vector<ZVec> short_vectors(const ZMat& rows, const GramForm& gram, const Rat& bound);

// Same but also returns the form value per vector.
std::vector<std::pair<Rat, ZVec>> short_vectors_valued(const ZMat& rows, const GramForm& gram,
                                                       const Rat& bound);

// Value of the quadratic form at an ambient vector.
Rat gram_value(const GramForm& gram, const ZVec& v);

}  // namespace btq

#endif
