#ifndef BTQ_UTIL_HPP
#define BTQ_UTIL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace btq {

using Int = mpz_class;
using Rat = mpq_class;

using ZVec = std::vector<Int>;
using QVec = std::vector<Rat>;
using ZMat = std::vector<ZVec>;
using QMat = std::vector<QVec>;

struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

inline void check(bool cond, const std::string& msg) {
    if (!cond) throw error(msg);
}

// ---------- integer helpers ----------

Int pow_int(const Int& base, unsigned long e);
Int mod_pos(const Int& a, const Int& m);          // representative in [0, m)
Int invmod(const Int& a, const Int& m);           // throws if not a unit
Int powmod(Int base, Int e, const Int& m);
unsigned long valuation(Int a, const Int& p);     // v_p(a), a != 0
Int isqrt_floor(const Int& a);
bool is_square(const Int& a, Int* root = nullptr);

// Largest integer t with t <= c + sqrt(b), for rational c and b >= 0.
// Exact; used for enumeration interval endpoints.
Int floor_plus_sqrt(const Rat& c, const Rat& b);
// Smallest integer t with t >= c - sqrt(b).
Int ceil_minus_sqrt(const Rat& c, const Rat& b);

// Trial-division factorization; throws if a composite cofactor above
// `limit` squared survives. Good enough for discriminant/norm sizes here.
std::vector<std::pair<Int, unsigned>> factor_int(Int n, unsigned long limit = 2000000);

std::vector<unsigned long> primes_up_to(unsigned long n);

// ---------- rational / matrix helpers ----------

Rat rat_from_string(const std::string& s);        // "num/den" or "num"
std::string rat_to_string(const Rat& q);

QMat qmat_mul(const QMat& a, const QMat& b);
QVec qvec_mat(const QVec& v, const QMat& m);
QMat qmat_inverse(const QMat& a);                 // throws if singular
Rat qmat_det(const QMat& a);
// Solve x * A = b exactly; nullopt if inconsistent.
std::optional<QVec> solve_left(const QMat& a, const QVec& b);
QMat qmat_identity(std::size_t n);

ZMat zmat_mul(const ZMat& a, const ZMat& b);
Int zmat_det(ZMat a);                             // Bareiss, exact

// ---------- polynomials over Q (dense, index = degree) ----------

using QPoly = std::vector<Rat>;
using ZPoly = std::vector<Int>;

QPoly qpoly_trim(QPoly p);
int qpoly_deg(const QPoly& p);                    // -1 for zero
QPoly qpoly_add(const QPoly& a, const QPoly& b);
QPoly qpoly_sub(const QPoly& a, const QPoly& b);
QPoly qpoly_mul(const QPoly& a, const QPoly& b);
QPoly qpoly_rem(QPoly a, const QPoly& b);
QPoly qpoly_derivative(const QPoly& p);
Rat qpoly_eval(const QPoly& p, const Rat& x);
QPoly qpoly_from_z(const ZPoly& p);

// Number of distinct real roots of squarefree p in (a, b]; a,b may be
// +-"infinity" via the wide bound returned by qpoly_root_bound.
struct SturmSequence {
    std::vector<QPoly> seq;
    explicit SturmSequence(const QPoly& p);
    int sign_changes_at(const Rat& x) const;
    int count_roots(const Rat& a, const Rat& b) const;  // roots in (a, b]
    int count_real_roots() const;
};

Rat qpoly_root_bound(const QPoly& p);             // all real roots in [-B, B]

// Isolating intervals (lo, hi] for every real root of squarefree p,
// sorted increasingly.
std::vector<std::pair<Rat, Rat>> isolate_real_roots(const QPoly& p);

// ---------- polynomials over F_p (p up to ~2^31, coeffs uint64) ----------

struct PolyModP {
    unsigned long p = 0;
    std::vector<unsigned long> c;                 // index = degree, reduced mod p

    int deg() const;
    void trim();
};

PolyModP poly_reduce_mod(const ZPoly& f, unsigned long p);
PolyModP polyp_mul(const PolyModP& a, const PolyModP& b);
PolyModP polyp_rem(PolyModP a, const PolyModP& b);
PolyModP polyp_gcd(PolyModP a, PolyModP b);       // monic gcd
PolyModP polyp_powmod(const PolyModP& base, Int e, const PolyModP& mod);
PolyModP polyp_xpow_minus_x(unsigned long k, const PolyModP& mod); // x^{p^k} - x mod `mod`
bool polyp_is_squarefree(const PolyModP& f);

// Distinct-degree split: for squarefree f returns list of (degree d,
// product of the irreducible factors of degree d).
std::vector<std::pair<unsigned, PolyModP>> polyp_distinct_degree(const PolyModP& f);

// Roots of f mod p (brute scan; p must be small enough to scan).
std::vector<unsigned long> polyp_roots(const PolyModP& f, unsigned long scan_limit = 2000000);

// Full factorization of squarefree f (Cantor-Zassenhaus with a fixed
// deterministic trial sequence).
std::vector<PolyModP> polyp_factor_squarefree(const PolyModP& f);

PolyModP polyp_divexact(const PolyModP& a, const PolyModP& b);

// Complete factorization with multiplicities, including the wild
// (derivative-vanishing) case via x^p deflation.
std::vector<std::pair<PolyModP, unsigned>> polyp_factor_full(const PolyModP& f);

// ---------- deterministic RNG ----------

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}
    std::uint64_t next(std::uint64_t bound) {     // uniform in [0, bound)
        std::uniform_int_distribution<std::uint64_t> d(0, bound - 1);
        return d(eng);
    }
    std::int64_t next_signed(std::int64_t lo, std::int64_t hi) {
        std::uniform_int_distribution<std::int64_t> d(lo, hi);
        return d(eng);
    }
};

}  // namespace btq

#endif
