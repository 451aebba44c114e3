#include "btq/util.hpp"

#include <algorithm>
#include <numeric>

namespace btq {

// ---------- integer helpers ----------

Int pow_int(const Int& base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

Int mod_pos(const Int& a, const Int& m) {
    Int r = a % m;
    if (r < 0) r += m;
    return r;
}

Int invmod(const Int& a, const Int& m) {
    Int r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
        throw error("invmod: not invertible");
    return r;
}

Int powmod(Int base, Int e, const Int& m) {
    check(e >= 0, "powmod: negative exponent");
    Int r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return r;
}

unsigned long valuation(Int a, const Int& p) {
    check(a != 0, "valuation of zero");
    unsigned long v = 0;
    while (mpz_divisible_p(a.get_mpz_t(), p.get_mpz_t())) {
        a /= p;
        ++v;
    }
    return v;
}

Int isqrt_floor(const Int& a) {
    check(a >= 0, "isqrt of negative");
    Int r;
    mpz_sqrt(r.get_mpz_t(), a.get_mpz_t());
    return r;
}

bool is_square(const Int& a, Int* root) {
    if (a < 0) return false;
    Int r = isqrt_floor(a);
    if (r * r == a) {
        if (root) *root = r;
        return true;
    }
    return false;
}

namespace {
// floor(sqrt(b)) pieces: decide t <= c + sqrt(b) exactly.
bool le_c_plus_sqrt(const Int& t, const Rat& c, const Rat& b) {
    Rat d = Rat(t) - c;
    if (d <= 0) return true;
    return d * d <= b;
}
bool ge_c_minus_sqrt(const Int& t, const Rat& c, const Rat& b) {
    Rat d = c - Rat(t);
    if (d <= 0) return true;
    return d * d <= b;
}
}  // namespace

Int floor_plus_sqrt(const Rat& c, const Rat& b) {
    check(b >= 0, "floor_plus_sqrt: negative radicand");
    // double estimate, then exact correction
    double est = mpq_get_d(c.get_mpq_t()) + std::sqrt(mpq_get_d(b.get_mpq_t()));
    Int t(static_cast<long>(std::floor(est)));
    while (!le_c_plus_sqrt(t, c, b)) --t;
    while (le_c_plus_sqrt(t + 1, c, b)) ++t;
    return t;
}

Int ceil_minus_sqrt(const Rat& c, const Rat& b) {
    check(b >= 0, "ceil_minus_sqrt: negative radicand");
    double est = mpq_get_d(c.get_mpq_t()) - std::sqrt(mpq_get_d(b.get_mpq_t()));
    Int t(static_cast<long>(std::ceil(est)));
    while (!ge_c_minus_sqrt(t, c, b)) ++t;
    while (ge_c_minus_sqrt(t - 1, c, b)) --t;
    return t;
}

std::vector<std::pair<Int, unsigned>> factor_int(Int n, unsigned long limit) {
    check(n != 0, "factor_int: zero");
    if (n < 0) n = -n;
    std::vector<std::pair<Int, unsigned>> out;
    auto strip = [&](const Int& q) {
        unsigned e = 0;
        while (mpz_divisible_p(n.get_mpz_t(), q.get_mpz_t())) {
            n /= q;
            ++e;
        }
        if (e) out.emplace_back(q, e);
    };
    strip(Int(2));
    for (Int q = 3; q * q <= n && q <= (unsigned long)limit; q += 2) strip(q);
    if (n > 1) {
        if (mpz_probab_prime_p(n.get_mpz_t(), 40))
            out.emplace_back(n, 1);
        else
            throw error("factor_int: composite cofactor too large: " + n.get_str());
    }
    return out;
}

std::vector<unsigned long> primes_up_to(unsigned long n) {
    std::vector<bool> sieve(n + 1, true);
    std::vector<unsigned long> ps;
    for (unsigned long i = 2; i <= n; ++i) {
        if (!sieve[i]) continue;
        ps.push_back(i);
        for (unsigned long j = 2 * i; j <= n; j += i) sieve[j] = false;
    }
    return ps;
}

// ---------- rationals / matrices ----------

Rat rat_from_string(const std::string& s) {
    Rat q;
    if (q.set_str(s, 10) != 0) throw error("bad rational literal: " + s);
    q.canonicalize();
    return q;
}

std::string rat_to_string(const Rat& q) {
    Rat c = q;
    c.canonicalize();
    return c.get_str();
}

QMat qmat_identity(std::size_t n) {
    QMat m(n, QVec(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

QMat qmat_mul(const QMat& a, const QMat& b) {
    std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    check(a.empty() || a[0].size() == k, "qmat_mul: shape mismatch");
    QMat c(n, QVec(m, Rat(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < k; ++l) {
            if (a[i][l] == 0) continue;
            for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][l] * b[l][j];
        }
    return c;
}

QVec qvec_mat(const QVec& v, const QMat& m) {
    check(v.size() == m.size(), "qvec_mat: shape mismatch");
    std::size_t cols = m.empty() ? 0 : m[0].size();
    QVec r(cols, Rat(0));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == 0) continue;
        for (std::size_t j = 0; j < cols; ++j) r[j] += v[i] * m[i][j];
    }
    return r;
}

namespace {
// Gauss-Jordan returning rank; augmented columns transformed in place.
std::size_t gauss_jordan(QMat& m) {
    std::size_t rows = m.size(), cols = m.empty() ? 0 : m[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && m[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[piv], m[r]);
        Rat inv = 1 / m[r][c];
        for (auto& x : m[r]) x *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rat f = m[i][c];
            for (std::size_t j = 0; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        ++r;
    }
    return r;
}
}  // namespace

QMat qmat_inverse(const QMat& a) {
    std::size_t n = a.size();
    QMat work(n, QVec(2 * n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) work[i][j] = a[i][j];
        work[i][n + i] = 1;
    }
    // plain elimination with column pivots in the left block
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && work[piv][c] == 0) ++piv;
        check(piv < n, "qmat_inverse: singular matrix");
        std::swap(work[piv], work[c]);
        Rat inv = 1 / work[c][c];
        for (auto& x : work[c]) x *= inv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || work[i][c] == 0) continue;
            Rat f = work[i][c];
            for (std::size_t j = 0; j < 2 * n; ++j) work[i][j] -= f * work[c][j];
        }
    }
    QMat inv(n, QVec(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv[i][j] = work[i][n + j];
    return inv;
}

Rat qmat_det(const QMat& a) {
    std::size_t n = a.size();
    QMat m = a;
    Rat det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && m[piv][c] == 0) ++piv;
        if (piv == n) return Rat(0);
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        Rat inv = 1 / m[c][c];
        for (std::size_t i = c + 1; i < n; ++i) {
            if (m[i][c] == 0) continue;
            Rat f = m[i][c] * inv;
            for (std::size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
        }
    }
    return det;
}

std::optional<QVec> solve_left(const QMat& a, const QVec& b) {
    // x * a = b  <=>  a^T x^T = b^T ; build augmented [a^T | b^T]
    std::size_t rows = a.size();
    if (rows == 0) return std::nullopt;
    std::size_t cols = a[0].size();
    check(b.size() == cols, "solve_left: shape mismatch");
    QMat aug(cols, QVec(rows + 1, Rat(0)));
    for (std::size_t i = 0; i < cols; ++i) {
        for (std::size_t j = 0; j < rows; ++j) aug[i][j] = a[j][i];
        aug[i][rows] = b[i];
    }
    gauss_jordan(aug);
    QVec x(rows, Rat(0));
    // read echelon rows: each pivot row determines one unknown
    for (const auto& row : aug) {
        std::size_t c = 0;
        while (c < rows && row[c] == 0) ++c;
        if (c == rows) {
            if (row[rows] != 0) return std::nullopt;  // inconsistent
            continue;
        }
        x[c] = row[rows];  // pivot normalized to 1, free unknowns set to zero
    }
    QVec bx(cols, Rat(0));
    for (std::size_t j = 0; j < rows; ++j) {
        if (x[j] == 0) continue;
        for (std::size_t i = 0; i < cols; ++i) bx[i] += x[j] * a[j][i];
    }
    // Free columns were zeroed; re-solve residual if mismatch.
    for (std::size_t i = 0; i < cols; ++i)
        if (bx[i] != b[i]) return std::nullopt;
    return x;
}

ZMat zmat_mul(const ZMat& a, const ZMat& b) {
    std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    ZMat c(n, ZVec(m, Int(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < k; ++l) {
            if (a[i][l] == 0) continue;
            for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][l] * b[l][j];
        }
    return c;
}

Int zmat_det(ZMat a) {
    // Bareiss fraction-free elimination
    std::size_t n = a.size();
    if (n == 0) return Int(1);
    Int prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t piv = k + 1;
            while (piv < n && a[piv][k] == 0) ++piv;
            if (piv == n) return Int(0);
            std::swap(a[piv], a[k]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                Int num = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                a[i][j] = num / prev;  // exact by Bareiss
            }
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

// ---------- polynomials over Q ----------

QPoly qpoly_trim(QPoly p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
    return p;
}

int qpoly_deg(const QPoly& p) {
    for (std::size_t i = p.size(); i-- > 0;)
        if (p[i] != 0) return static_cast<int>(i);
    return -1;
}

QPoly qpoly_add(const QPoly& a, const QPoly& b) {
    QPoly r(std::max(a.size(), b.size()), Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return qpoly_trim(r);
}

QPoly qpoly_sub(const QPoly& a, const QPoly& b) {
    QPoly r(std::max(a.size(), b.size()), Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    return qpoly_trim(r);
}

QPoly qpoly_mul(const QPoly& a, const QPoly& b) {
    if (a.empty() || b.empty()) return {};
    QPoly r(a.size() + b.size() - 1, Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    return qpoly_trim(r);
}

QPoly qpoly_rem(QPoly a, const QPoly& b) {
    a = qpoly_trim(std::move(a));
    int db = qpoly_deg(b);
    check(db >= 0, "qpoly_rem: division by zero polynomial");
    while (qpoly_deg(a) >= db) {
        int da = qpoly_deg(a);
        Rat f = a[da] / b[db];
        for (int i = 0; i <= db; ++i) a[da - db + i] -= f * b[i];
        a = qpoly_trim(std::move(a));
    }
    return a;
}

QPoly qpoly_derivative(const QPoly& p) {
    if (p.size() <= 1) return {};
    QPoly r(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) r[i - 1] = p[i] * Rat(static_cast<long>(i));
    return qpoly_trim(r);
}

Rat qpoly_eval(const QPoly& p, const Rat& x) {
    Rat r = 0;
    for (std::size_t i = p.size(); i-- > 0;) r = r * x + p[i];
    return r;
}

QPoly qpoly_from_z(const ZPoly& p) {
    QPoly r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) r[i] = Rat(p[i]);
    return r;
}

SturmSequence::SturmSequence(const QPoly& p) {
    QPoly p0 = qpoly_trim(p);
    check(qpoly_deg(p0) >= 1, "Sturm: constant polynomial");
    seq.push_back(p0);
    seq.push_back(qpoly_derivative(p0));
    while (qpoly_deg(seq.back()) > 0) {
        QPoly r = qpoly_rem(seq[seq.size() - 2], seq.back());
        if (qpoly_deg(r) < 0) break;
        for (auto& c : r) c = -c;
        seq.push_back(std::move(r));
    }
}

int SturmSequence::sign_changes_at(const Rat& x) const {
    int changes = 0, last = 0;
    for (const auto& p : seq) {
        Rat v = qpoly_eval(p, x);
        int s = sgn(v);
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

int SturmSequence::count_roots(const Rat& a, const Rat& b) const {
    return sign_changes_at(a) - sign_changes_at(b);
}

int SturmSequence::count_real_roots() const {
    Rat bound = qpoly_root_bound(seq[0]);
    return count_roots(-bound, bound);
}

Rat qpoly_root_bound(const QPoly& p) {
    int d = qpoly_deg(p);
    check(d >= 1, "root bound of constant");
    Rat m = 0;
    for (int i = 0; i < d; ++i) {
        Rat a = abs(p[i] / p[d]);
        if (a > m) m = a;
    }
    return m + 2;  // Cauchy bound, padded so roots lie strictly inside
}

std::vector<std::pair<Rat, Rat>> isolate_real_roots(const QPoly& p) {
    SturmSequence st(p);
    Rat bound = qpoly_root_bound(p);
    std::vector<std::pair<Rat, Rat>> out;
    // bisection stack over (lo, hi] with root counts
    struct Seg {
        Rat lo, hi;
        int count;
    };
    std::vector<Seg> stack{{-bound, bound, st.count_roots(-bound, bound)}};
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        if (s.count == 0) continue;
        if (s.count == 1) {
            out.emplace_back(s.lo, s.hi);
            continue;
        }
        Rat mid = (s.lo + s.hi) / 2;
        int left = st.count_roots(s.lo, mid);
        stack.push_back({mid, s.hi, s.count - left});
        stack.push_back({s.lo, mid, left});
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

// ---------- polynomials over F_p ----------

namespace {
inline unsigned long mulmod_ul(unsigned long a, unsigned long b, unsigned long p) {
    return static_cast<unsigned long>((__uint128_t)a * b % p);
}
}  // namespace

int PolyModP::deg() const {
    for (std::size_t i = c.size(); i-- > 0;)
        if (c[i] != 0) return static_cast<int>(i);
    return -1;
}

void PolyModP::trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
}

PolyModP poly_reduce_mod(const ZPoly& f, unsigned long p) {
    PolyModP r;
    r.p = p;
    r.c.resize(f.size());
    Int pz(p);
    for (std::size_t i = 0; i < f.size(); ++i) r.c[i] = mod_pos(f[i], pz).get_ui();
    r.trim();
    return r;
}

PolyModP polyp_mul(const PolyModP& a, const PolyModP& b) {
    PolyModP r;
    r.p = a.p;
    if (a.c.empty() || b.c.empty()) return r;
    r.c.assign(a.c.size() + b.c.size() - 1, 0);
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        if (!a.c[i]) continue;
        for (std::size_t j = 0; j < b.c.size(); ++j)
            r.c[i + j] = (r.c[i + j] + (__uint128_t)a.c[i] * b.c[j]) % a.p;
    }
    r.trim();
    return r;
}

PolyModP polyp_rem(PolyModP a, const PolyModP& b) {
    int db = b.deg();
    check(db >= 0, "polyp_rem: zero divisor");
    unsigned long p = b.p;
    unsigned long lead_inv = invmod(Int(b.c[db]), Int(p)).get_ui();
    a.trim();
    while (a.deg() >= db) {
        int da = a.deg();
        unsigned long f = mulmod_ul(a.c[da], lead_inv, p);
        if (f) {
            for (int i = 0; i <= db; ++i) {
                unsigned long sub = mulmod_ul(f, b.c[i], p);
                unsigned long& tgt = a.c[da - db + i];
                tgt = (tgt + p - sub) % p;
            }
        }
        a.trim();
    }
    return a;
}

PolyModP polyp_gcd(PolyModP a, PolyModP b) {
    a.trim();
    b.trim();
    while (b.deg() >= 0) {
        PolyModP r = polyp_rem(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (a.deg() >= 0) {  // make monic
        unsigned long inv = invmod(Int(a.c[a.deg()]), Int(a.p)).get_ui();
        for (auto& x : a.c) x = mulmod_ul(x, inv, a.p);
    }
    return a;
}

PolyModP polyp_powmod(const PolyModP& base, Int e, const PolyModP& mod) {
    PolyModP r;
    r.p = mod.p;
    r.c = {1 % mod.p};
    PolyModP b = polyp_rem(base, mod);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = polyp_rem(polyp_mul(r, b), mod);
        e >>= 1;
        if (e > 0) b = polyp_rem(polyp_mul(b, b), mod);
    }
    return r;
}

PolyModP polyp_xpow_minus_x(unsigned long k, const PolyModP& mod) {
    PolyModP x;
    x.p = mod.p;
    x.c = {0, 1};
    Int e = pow_int(Int(mod.p), k);
    PolyModP xq = polyp_powmod(x, e, mod);
    // xq - x
    if (xq.c.size() < 2) xq.c.resize(2, 0);
    xq.c[1] = (xq.c[1] + mod.p - 1) % mod.p;
    xq.trim();
    return xq;
}

bool polyp_is_squarefree(const PolyModP& f) {
    PolyModP d;
    d.p = f.p;
    if (f.deg() < 1) return true;
    d.c.resize(f.c.size() - 1);
    for (std::size_t i = 1; i < f.c.size(); ++i)
        d.c[i - 1] = mulmod_ul(f.c[i], i % f.p, f.p);
    d.trim();
    if (d.deg() < 0) return false;  // derivative vanished: p-th power present
    return polyp_gcd(f, d).deg() == 0;
}

std::vector<std::pair<unsigned, PolyModP>> polyp_distinct_degree(const PolyModP& f) {
    std::vector<std::pair<unsigned, PolyModP>> out;
    PolyModP g = f;
    // make monic
    {
        unsigned long inv = invmod(Int(g.c[g.deg()]), Int(g.p)).get_ui();
        for (auto& x : g.c) x = mulmod_ul(x, inv, g.p);
    }
    unsigned d = 0;
    while (g.deg() > 0) {
        ++d;
        if (static_cast<int>(2 * d) > g.deg()) {
            out.emplace_back(static_cast<unsigned>(g.deg()), g);
            break;
        }
        PolyModP split = polyp_gcd(g, polyp_xpow_minus_x(d, g));
        if (split.deg() > 0) {
            out.emplace_back(d, split);
            // g /= split
            PolyModP q;
            q.p = g.p;
            // long division quotient
            PolyModP rem = g;
            int ds = split.deg();
            q.c.assign(g.deg() - ds + 1, 0);
            while (rem.deg() >= ds) {
                int dr = rem.deg();
                unsigned long fqc = rem.c[dr];  // split monic
                q.c[dr - ds] = fqc;
                for (int i = 0; i <= ds; ++i) {
                    unsigned long sub = mulmod_ul(fqc, split.c[i], g.p);
                    rem.c[dr - ds + i] = (rem.c[dr - ds + i] + g.p - sub) % g.p;
                }
                rem.trim();
            }
            g = std::move(q);
            g.trim();
        }
    }
    return out;
}

std::vector<unsigned long> polyp_roots(const PolyModP& f, unsigned long scan_limit) {
    check(f.p <= scan_limit, "polyp_roots: prime too large for scan");
    std::vector<unsigned long> roots;
    for (unsigned long r = 0; r < f.p; ++r) {
        unsigned long v = 0;
        for (std::size_t i = f.c.size(); i-- > 0;) v = (mulmod_ul(v, r, f.p) + f.c[i]) % f.p;
        if (v == 0) roots.push_back(r);
    }
    return roots;
}

std::vector<PolyModP> polyp_factor_squarefree(const PolyModP& f) {
    std::vector<PolyModP> done;
    auto dd = polyp_distinct_degree(f);
    Rng rng(0x5eed);
    for (auto& [d, prod] : dd) {
        std::vector<PolyModP> work{prod};
        while (!work.empty()) {
            PolyModP g = work.back();
            work.pop_back();
            if (g.deg() == static_cast<int>(d)) {
                done.push_back(g);
                continue;
            }
            // Cantor-Zassenhaus split with deterministic retry sequence
            for (int attempt = 0;; ++attempt) {
                check(attempt < 200, "equal-degree factorization failed to split");
                PolyModP a;
                a.p = g.p;
                a.c.resize(g.deg());
                for (auto& x : a.c) x = rng.next(g.p);
                a.trim();
                if (a.deg() < 1) continue;
                PolyModP h;
                if (g.p == 2) {
                    // trace map T(a) = a + a^2 + ... + a^{2^{d-1}}
                    h = a;
                    PolyModP t = a;
                    for (unsigned i = 1; i < d; ++i) {
                        t = polyp_rem(polyp_mul(t, t), g);
                        // h += t
                        if (h.c.size() < t.c.size()) h.c.resize(t.c.size(), 0);
                        for (std::size_t j = 0; j < t.c.size(); ++j) h.c[j] ^= t.c[j];
                        h.trim();
                    }
                } else {
                    Int e = (pow_int(Int(g.p), d) - 1) / 2;
                    h = polyp_powmod(a, e, g);
                    // h - 1
                    if (h.c.empty()) h.c.resize(1, 0);
                    h.c[0] = (h.c[0] + g.p - 1) % g.p;
                    h.trim();
                }
                PolyModP s = polyp_gcd(h, g);
                if (s.deg() > 0 && s.deg() < g.deg()) {
                    // push s and g/s
                    PolyModP rem = g, q;
                    q.p = g.p;
                    int ds = s.deg();
                    q.c.assign(g.deg() - ds + 1, 0);
                    while (rem.deg() >= ds) {
                        int dr = rem.deg();
                        unsigned long fc = rem.c[dr];
                        q.c[dr - ds] = fc;
                        for (int i = 0; i <= ds; ++i) {
                            unsigned long sub = mulmod_ul(fc, s.c[i], g.p);
                            rem.c[dr - ds + i] = (rem.c[dr - ds + i] + g.p - sub) % g.p;
                        }
                        rem.trim();
                    }
                    work.push_back(s);
                    work.push_back(q);
                    break;
                }
            }
        }
    }
    // normalize: monic, sorted for determinism
    for (auto& g : done) {
        unsigned long inv = invmod(Int(g.c[g.deg()]), Int(g.p)).get_ui();
        for (auto& x : g.c) x = mulmod_ul(x, inv, g.p);
    }
    std::sort(done.begin(), done.end(), [](const PolyModP& a, const PolyModP& b) {
        if (a.deg() != b.deg()) return a.deg() < b.deg();
        for (std::size_t i = a.c.size(); i-- > 0;)
            if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
        return false;
    });
    return done;
}

PolyModP polyp_divexact(const PolyModP& a, const PolyModP& b) {
    int ds = b.deg();
    check(ds >= 0, "polyp_divexact: zero divisor");
    unsigned long p = b.p;
    unsigned long lead_inv = invmod(Int(b.c[ds]), Int(p)).get_ui();
    PolyModP rem = a, q;
    q.p = p;
    rem.trim();
    if (rem.deg() < ds) {
        check(rem.deg() < 0, "polyp_divexact: not divisible");
        return q;
    }
    q.c.assign(rem.deg() - ds + 1, 0);
    while (rem.deg() >= ds) {
        int dr = rem.deg();
        unsigned long f = mulmod_ul(rem.c[dr], lead_inv, p);
        q.c[dr - ds] = f;
        for (int i = 0; i <= ds; ++i) {
            unsigned long sub = mulmod_ul(f, b.c[i], p);
            rem.c[dr - ds + i] = (rem.c[dr - ds + i] + p - sub) % p;
        }
        rem.trim();
    }
    check(rem.deg() < 0, "polyp_divexact: not divisible");
    return q;
}

std::vector<std::pair<PolyModP, unsigned>> polyp_factor_full(const PolyModP& f_in) {
    std::vector<std::pair<PolyModP, unsigned>> out;
    PolyModP f = f_in;
    f.trim();
    check(f.deg() >= 0, "polyp_factor_full: zero polynomial");
    if (f.deg() == 0) return out;
    unsigned long p = f.p;

    // derivative
    PolyModP fd;
    fd.p = p;
    if (f.c.size() >= 2) {
        fd.c.resize(f.c.size() - 1);
        for (std::size_t i = 1; i < f.c.size(); ++i) fd.c[i - 1] = mulmod_ul(f.c[i], i % p, p);
        fd.trim();
    }
    if (fd.deg() < 0) {
        // f = U(x^p); coefficients of F_p are fixed by Frobenius
        PolyModP u;
        u.p = p;
        u.c.assign(f.deg() / p + 1, 0);
        for (std::size_t i = 0; i < f.c.size(); ++i) {
            if (f.c[i] == 0) continue;
            check(i % p == 0, "polyp_factor_full: deflation failed");
            u.c[i / p] = f.c[i];
        }
        for (auto& [g, m] : polyp_factor_full(u)) out.emplace_back(g, m * p);
        return out;
    }
    PolyModP g = polyp_gcd(f, fd);
    PolyModP sqfree = (g.deg() > 0) ? polyp_divexact(f, g) : f;
    for (const auto& h : polyp_factor_squarefree(sqfree)) {
        unsigned m = 0;
        while (polyp_rem(f, h).deg() < 0) {
            f = polyp_divexact(f, h);
            ++m;
        }
        out.emplace_back(h, m);
    }
    if (f.deg() > 0) {
        // leftover wild part, recurse
        for (auto& [h, m] : polyp_factor_full(f)) out.emplace_back(h, m);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.first.deg() != b.first.deg()) return a.first.deg() < b.first.deg();
        return a.first.c < b.first.c;
    });
    return out;
}

}  // namespace btq
