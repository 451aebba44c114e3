#ifndef BTQ_FIELD_HPP
#define BTQ_FIELD_HPP

#include <map>
#include <memory>

#include "btq/lattice.hpp"
#include "btq/util.hpp"

namespace btq {

class NumberField;

// Element of a totally real field F, stored as exact rational coordinates
// over the integral basis. Elements keep a non-owning pointer to their
// field; fields are immutable once constructed.
struct FieldElement {
    const NumberField* K = nullptr;
    QVec coords;

    bool is_zero() const;
    bool is_integral() const;       // all coordinates integers <=> in O_F
    bool is_rational() const;
    Rat rational_value() const;     // requires is_rational

    FieldElement operator+(const FieldElement&) const;
    FieldElement operator-(const FieldElement&) const;
    FieldElement operator-() const;
    FieldElement operator*(const FieldElement&) const;
    FieldElement operator*(const Rat&) const;
    FieldElement inverse() const;   // throws on zero
    FieldElement operator/(const FieldElement&) const;
    bool operator==(const FieldElement&) const;
    bool operator<(const FieldElement&) const;  // lexicographic on coords

    Rat norm() const;
    Rat trace() const;
    QVec power_coords() const;      // coordinates over 1, theta, ..., theta^{n-1}
    std::string str() const;
};

// Degree-1 unramified prime together with the data needed for the p-adic
// embedding: rational prime p, the mod-p root of the defining polynomial
// selecting the place, class-order exponent d and a generator delta of
// the d-th power.
struct PrimeSite {
    const NumberField* K = nullptr;
    Int p;
    Int r;                   // root approximation, exact mod p^r_prec
    unsigned r_prec = 1;
    unsigned fprime_val = 0; // v_p(f'(r)), stable along the branch
    FieldElement pi;         // uniformizer; defaults to p itself
    FieldElement gen;        // second generator: (p, gen) is the ideal
    unsigned d = 0;          // 0 until principalize() fills it
    FieldElement delta;      // generator of site^d
    ZMat ideal_hnf;          // Z-basis (omega coords) of the prime ideal

    Int norm() const { return p; }
    // Lift of the root to precision p^N (theta -> root embeds O_F -> Z/p^N).
    Int root_mod(unsigned long N) const;
    // Image of x (must be p-integral at this site) in Z/p^N.
    Int embed(const FieldElement& x, unsigned long N) const;
    unsigned long valuation(const FieldElement& x) const;  // v_site(x), x != 0
    std::string str() const;
};

// General prime ideal (any inertia degree / ramification), as a pair
// (p, generator) plus its lattice.
struct PrimeIdeal {
    const NumberField* K = nullptr;
    Int p;
    unsigned e = 1, f = 1;
    FieldElement gen;        // second generator; (p, gen) = the ideal
    ZMat ideal_hnf;

    Int norm() const { return pow_int(p, f); }
    bool operator==(const PrimeIdeal& o) const { return p == o.p && ideal_hnf == o.ideal_hnf; }
    bool operator<(const PrimeIdeal& o) const {
        if (p != o.p) return p < o.p;
        return ideal_hnf < o.ideal_hnf;
    }
    std::string str() const;
};

struct Ideal {
    std::vector<std::pair<PrimeIdeal, unsigned>> factors;  // sorted, distinct
    Int norm = 1;

    bool is_one() const { return factors.empty(); }
    bool squarefree() const;
    bool coprime_to(const Ideal& other) const;
    std::string str() const;
};

// Finite quotient ring O_F / L for a full-rank ideal lattice L. Supports
// the residue computations behind Hilbert symbols and valuations.
struct QuotientRing {
    const NumberField* K = nullptr;
    ZMat hnf_basis;          // n x n HNF
    ZVec reduce(const ZVec& v) const;
    ZVec mul(const ZVec& a, const ZVec& b) const;
    ZVec pow(ZVec a, Int e) const;
    ZVec one() const;
    bool is_zero(const ZVec& v) const;
    Int size() const;
    // enumerate all residues (mixed radix over the HNF diagonal)
    std::vector<ZVec> residues() const;
};

class NumberField {
  public:
    std::string label;
    ZPoly poly;              // monic integral defining polynomial
    unsigned degree = 0;
    QMat omega;              // row i = integral basis element over power basis
    QMat omega_inv;          // power -> omega coordinates
    Int disc = 0;            // field discriminant
    Int zk_index = 1;        // [O_F : Z[theta]]
    std::vector<QMat> automorphism_mats;  // omega -> omega coordinate maps
    std::map<Int, std::vector<std::pair<QVec, std::pair<unsigned, unsigned>>>>
        index_prime_data;    // p -> list of (gen omega-coords, (e, f))

    NumberField() = default;
    NumberField(const NumberField&) = delete;
    NumberField& operator=(const NumberField&) = delete;

    // Builds derived data (multiplication table, trace vector, real-root
    // isolation) and validates: irreducibility at small degree, totally
    // real, integral structure constants, automorphism images are roots.
    static std::unique_ptr<NumberField> create(std::string label, ZPoly poly, QMat omega,
                                               Int disc, std::vector<QVec> automorphism_images,
                                               std::map<Int, std::vector<std::pair<QVec, std::pair<unsigned, unsigned>>>>
                                                   index_primes = {});

    FieldElement element(QVec omega_coords) const;
    FieldElement from_power_coords(const QVec& power_coords) const;
    FieldElement from_rational(const Rat& q) const;
    FieldElement zero() const;
    FieldElement one() const;
    FieldElement theta() const;

    const QVec& mult_row(std::size_t i, std::size_t j) const {  // omega_i * omega_j
        return mult_table_[i * degree + j];
    }
    const QVec& trace_vector() const { return trace_vec_; }
    const QMat& trace_form() const { return trace_form_; }  // Tr(omega_i omega_j)

    // Signs of x at every real embedding, in the order of the isolated
    // roots of the defining polynomial (increasing). Exact via Sturm-style
    // interval refinement.
    std::vector<int> embedding_signs(const FieldElement& x) const;
    bool is_totally_positive(const FieldElement& x) const;

    std::size_t automorphism_count() const { return automorphism_mats.size(); }
    FieldElement apply_automorphism(std::size_t idx, const FieldElement& x) const;

  private:
    std::vector<QVec> mult_table_;
    QVec trace_vec_;
    QMat trace_form_;
    std::vector<std::pair<Rat, Rat>> root_intervals_;  // isolating, sorted
    friend struct FieldElement;
};

// ---------- prime / ideal operations ----------

// Degree-1 unramified sites above p (d, delta left unset). Uses the field
// table's index-prime data when p divides [O_F : Z[theta]].
std::vector<PrimeSite> split_prime(const NumberField& K, const Int& p);

// All primes above p, any degree. Throws "needs external prime data" when
// p divides the index and no table data is present.
std::vector<PrimeIdeal> primes_above(const NumberField& K, const Int& p);

// Fill d (smallest power that is principal, searched up to max_d) and a
// generator delta found by trace-form lattice enumeration.
void principalize(PrimeSite& site, unsigned max_d = 8);

// All integral ideals of norm <= X, sorted by (norm, factor data).
std::vector<Ideal> enumerate_ideals(const NumberField& K, const Int& X);

Ideal ideal_one(const NumberField& K);
Ideal ideal_mul(const Ideal& a, const Ideal& b);
Ideal ideal_from_prime(const PrimeIdeal& q, unsigned e = 1);
// Factor the principal ideal (x) for integral x.
Ideal ideal_of_element(const NumberField& K, const FieldElement& x);
PrimeIdeal prime_of_site(const PrimeSite& site);

// Lattice of an ideal power q^k (omega coordinates, HNF).
ZMat ideal_power_lattice(const PrimeIdeal& q, unsigned k);
QuotientRing quotient_ring(const NumberField& K, ZMat ideal_hnf);

// v_q(x) for x in F (negative allowed for non-integral x).
long ideal_valuation(const PrimeIdeal& q, const FieldElement& x);

// Image of ideal under automorphism idx: applied factor by factor.
Ideal apply_automorphism(const NumberField& K, std::size_t idx, const Ideal& I);
PrimeIdeal apply_automorphism(const NumberField& K, std::size_t idx, const PrimeIdeal& q);

// Partial Euler product for zeta_F(2): lower bound (downward rounded) and
// an upper bound via the tail estimate exp(2n / bound).
struct Zeta2Bounds {
    double lower = 1.0;
    double upper = 1.0;
};
Zeta2Bounds zeta2_bounds(const NumberField& K, unsigned long prime_bound);
double zeta2_lower(const NumberField& K, unsigned long prime_bound);

}  // namespace btq

#endif
