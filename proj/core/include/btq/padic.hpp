#ifndef BTQ_PADIC_HPP
#define BTQ_PADIC_HPP

#include <array>
#include <optional>

#include "btq/field.hpp"
#include "btq/util.hpp"

namespace btq {

// Unique root of f congruent to r mod p, lifted to precision p^N.
// Requires f(r) = 0 and f'(r) != 0 mod p.
Int hensel_root(const ZPoly& f, const Int& p, const Int& r, unsigned long N);

// Lift a factorization f = g*h (mod p), gcd(g,h)=1 mod p, to f = G*H
// (mod p^N); returns the lift G of the monic factor g.
ZPoly hensel_lift_factor(const ZPoly& f, const ZPoly& g, const Int& p, unsigned long N);

// O/q^N for an unramified prime q of residue degree f: the chain ring
// Z[w]/(p^N, modulus(w)). f = 1 is plain Z/p^N. Elements are coefficient
// vectors of length f with entries in [0, p^N).
struct LocalRing {
    Int p;
    unsigned long N = 0;
    unsigned f = 1;
    Int pN;
    ZPoly modulus;  // monic degree f, unused when f == 1

    using Elt = ZVec;

    static LocalRing zp(const Int& p, unsigned long N);
    static LocalRing galois(const Int& p, unsigned long N, ZPoly modulus);

    Elt zero() const { return Elt(f, Int(0)); }
    Elt one() const;
    Elt from_int(const Int& x) const;
    Elt add(const Elt& a, const Elt& b) const;
    Elt sub(const Elt& a, const Elt& b) const;
    Elt neg(const Elt& a) const;
    Elt mul(const Elt& a, const Elt& b) const;
    Elt mul_int(const Elt& a, const Int& c) const;
    Elt pow(Elt a, Int e) const;
    bool is_zero(const Elt& a) const;
    bool is_unit(const Elt& a) const;
    bool eq(const Elt& a, const Elt& b) const;
    unsigned long val(const Elt& a) const;  // min v_p of coords; N for zero
    Elt div_pow_p(const Elt& a, unsigned long k) const;  // exact division
    Elt inv(const Elt& a) const;                         // unit required
    // square root of any element (handles p^2k * unit); nullopt otherwise
    std::optional<Elt> sqrt(const Elt& a) const;
    // embed a field element given by power-basis coordinates, theta -> w
    // (or theta -> root for f == 1 with explicit root). p-part of the
    // denominator must cancel; throws otherwise.
    Elt embed_power(const QVec& power_coords, const Elt& theta_image) const;
    Elt reduce_precision(const Elt& a, unsigned long N2) const;
};

using LMat = std::vector<std::vector<LocalRing::Elt>>;

// Howell-form machinery over a chain ring: complete left kernels and
// complete solution sets (every solution is a combination of the outputs).
LMat howell_left_kernel(const LocalRing& R, const LMat& a);

// Rows x_i with x_i * a = targets_i; throws "target outside image" when a
// target row is not in the row span.
LMat howell_solve_left(const LocalRing& R, const LMat& a, const LMat& targets);

// Integer convenience wrappers for f = 1 matrices (entries reduced mod p^N).
ZMat howell_left_kernel_z(const Int& p, unsigned long N, const ZMat& a);
std::pair<ZMat, ZMat> howell_solve_z(const Int& p, unsigned long N, const ZMat& l,
                                     const ZMat& z);  // (kernel, solutions)

// 2x2 matrix over Z/p^N (row major), the working representation for
// splitting images and tree actions at finite precision.
struct Mat2z {
    std::array<Int, 4> m{};  // [a, b; c, d]
};
Mat2z mat2_mul(const Mat2z& x, const Mat2z& y, const Int& mod);
Int mat2_det(const Mat2z& x, const Int& mod);

// Splitting iota: B otimes F_p -> M_2(Q_p) with iota(Rmax_p) = M_2(Z_p),
// stored as images of the maximal order's Z-basis at precision N_cap.
// Immutable; precision upgrades build a fresh value.
struct QuatOrder;          // quatalg.hpp
struct QuaternionAlgebra;  // quatalg.hpp

struct SplittingMap {
    PrimeSite site;
    unsigned long n_cap = 0;
    std::vector<Mat2z> images;  // one per order basis element

    // Z-linear combination of basis images truncated to precision N <= n_cap.
    Mat2z embed(const ZVec& order_coords, unsigned long N) const;
};

SplittingMap build_splitting(const QuaternionAlgebra& B, const QuatOrder& rmax,
                             const PrimeSite& site, unsigned long n_cap);

}  // namespace btq

#endif
