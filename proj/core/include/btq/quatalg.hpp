#ifndef BTQ_QUATALG_HPP
#define BTQ_QUATALG_HPP

#include "btq/field.hpp"
#include "btq/padic.hpp"

namespace btq {

struct QuaternionAlgebra {
    const NumberField* K = nullptr;
    FieldElement a, b;  // i^2 = a, j^2 = b, ij = -ji
    bool definite = false;
    std::vector<PrimeIdeal> ram_finite;  // sorted

    std::string str() const;
};

// Computes definiteness and the (verified) finite ramification set.
QuaternionAlgebra make_algebra(const NumberField& K, FieldElement a, FieldElement b);

struct Quaternion {
    const QuaternionAlgebra* A = nullptr;
    std::array<FieldElement, 4> x;  // x0 + x1 i + x2 j + x3 ij

    Quaternion operator+(const Quaternion&) const;
    Quaternion operator-(const Quaternion&) const;
    Quaternion operator*(const Quaternion&) const;
    Quaternion scaled(const Rat&) const;
    Quaternion scaled(const FieldElement&) const;
    Quaternion conj() const;
    FieldElement nrd() const;
    FieldElement trd() const;
    bool operator==(const Quaternion&) const;
    bool is_zero() const;
    std::string str() const;
};

Quaternion quat_zero(const QuaternionAlgebra& A);
Quaternion quat_one(const QuaternionAlgebra& A);
Quaternion quat_gen(const QuaternionAlgebra& A, int k);  // 1, i, j, ij

struct QuatOrder {
    const QuaternionAlgebra* A = nullptr;
    std::vector<Quaternion> zbasis;  // 4n quaternions, a Z-basis
    QMat basis_mat;                  // row k = flattened coords of zbasis[k]
    QMat basis_inv;
    std::vector<std::vector<FieldElement>> gram_trd;  // trd(e_i conj(e_j))
    QMat gram_tr;                                     // Tr of the above

    QVec rational_coords(const Quaternion& q) const;
    ZVec coords(const Quaternion& q) const;  // throws when q is not in the order
    bool contains(const Quaternion& q) const;
    Quaternion element(const ZVec& coords) const;
    Quaternion element_q(const QVec& coords) const;
    std::size_t rank() const { return zbasis.size(); }
};

// Flattened rational coordinates of a quaternion over omega_u * gen_t.
QVec quat_flatten(const Quaternion& q);
Quaternion quat_unflatten(const QuaternionAlgebra& A, const QVec& flat);

// Validates: contains 1, closed under multiplication, full rank.
QuatOrder make_order(const QuaternionAlgebra& A, std::vector<Quaternion> zbasis);
// O_F<1, i, j, ij> for integral a, b.
QuatOrder standard_order(const QuaternionAlgebra& A);

// Hilbert symbol at a finite prime. Odd q uses the tame formula; q above 2
// an exhaustive solubility test mod q^{2 v_q(2) + 3} (throws when the
// residue ring is too large; see ramified_primes for the reciprocity
// fallback).
int hilbert_symbol(const NumberField& K, const FieldElement& a, const FieldElement& b,
                   const PrimeIdeal& q);

// All finite primes where (a,b/F) ramifies.
std::vector<PrimeIdeal> ramified_primes(const NumberField& K, const FieldElement& a,
                                        const FieldElement& b);

// Totally definite algebra with ram_finite exactly the factors of n_minus,
// found by a deterministic bounded search over totally negative pairs.
QuaternionAlgebra algebra_from_discriminant(const NumberField& K, const Ideal& n_minus);

Ideal reduced_discriminant(const QuatOrder& O);

// Radical-idealizer chain (with the hereditary-to-maximal idempotent step)
// until the reduced discriminant equals disc(B).
QuatOrder maximal_order(const QuatOrder& O0);

// Sublattice of rmax with lower-left entry of the local splitting = 0 mod
// q^e for every q^e || n_plus. Level must be coprime to disc(B); primes of
// any inertia degree are supported, ramified level primes are not.
QuatOrder eichler_order(const QuatOrder& rmax, const Ideal& n_plus);

}  // namespace btq

#endif
