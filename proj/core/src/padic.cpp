#include "btq/padic.hpp"

#include <algorithm>

namespace btq {

Int hensel_root(const ZPoly& f, const Int& p, const Int& r, unsigned long N) {
    auto evalz = [](const ZPoly& g, const Int& x, const Int& mod) {
        Int v = 0;
        for (std::size_t i = g.size(); i-- > 0;) v = mod_pos(v * x + g[i], mod);
        return v;
    };
    check(evalz(f, r, p) == 0, "hensel_root: f(r) != 0 mod p");
    ZPoly fd(f.size() - 1);
    for (std::size_t i = 1; i < f.size(); ++i) fd[i - 1] = f[i] * Int(static_cast<long>(i));
    check(evalz(fd, r, p) != 0, "hensel_root: f'(r) = 0 mod p");
    Int s = r;
    unsigned long k = 1;
    while (k < N) {
        unsigned long k2 = std::min(2 * k, N);
        Int mod = pow_int(p, k2);
        Int fs = evalz(f, s, mod);
        Int fps = evalz(fd, s, mod);
        s = mod_pos(s - fs * invmod(fps, mod), mod);
        k = k2;
    }
    return mod_pos(s, pow_int(p, N));
}

namespace {
// polynomial helpers over Z/m
ZPoly zp_trim(ZPoly a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}
ZPoly zp_mul_mod(const ZPoly& a, const ZPoly& b, const Int& m) {
    if (a.empty() || b.empty()) return {};
    ZPoly r(a.size() + b.size() - 1, Int(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = mod_pos(r[i + j] + a[i] * b[j], m);
    }
    return zp_trim(std::move(r));
}
ZPoly zp_sub_mod(const ZPoly& a, const ZPoly& b, const Int& m) {
    ZPoly r(std::max(a.size(), b.size()), Int(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = mod_pos(r[i] - b[i], m);
    for (auto& x : r) x = mod_pos(x, m);
    return zp_trim(std::move(r));
}
ZPoly zp_rem_monic(ZPoly a, const ZPoly& b, const Int& m) {
    a = zp_trim(std::move(a));
    std::size_t db = b.size() - 1;
    while (a.size() > db) {
        Int lead = a.back();
        std::size_t shift = a.size() - 1 - db;
        if (lead != 0)
            for (std::size_t i = 0; i < b.size(); ++i)
                a[shift + i] = mod_pos(a[shift + i] - lead * b[i], m);
        a.pop_back();
        a = zp_trim(std::move(a));
    }
    return a;
}
ZPoly zp_quo_monic(ZPoly a, const ZPoly& b, const Int& m) {
    a = zp_trim(std::move(a));
    std::size_t db = b.size() - 1;
    if (a.size() <= db) return {};
    ZPoly q(a.size() - db, Int(0));
    while (a.size() > db) {
        Int lead = a.back();
        std::size_t shift = a.size() - 1 - db;
        q[shift] = lead;
        for (std::size_t i = 0; i < b.size(); ++i)
            a[shift + i] = mod_pos(a[shift + i] - lead * b[i], m);
        a = zp_trim(std::move(a));
    }
    return zp_trim(std::move(q));
}
}  // namespace

ZPoly hensel_lift_factor(const ZPoly& f, const ZPoly& g_in, const Int& p, unsigned long N) {
    check(!g_in.empty() && !f.empty(), "hensel_lift_factor: empty polynomial");
    check(p.fits_ulong_p(), "hensel_lift_factor: prime too large");
    unsigned long pl = p.get_ui();
    ZPoly g = g_in;
    for (auto& c : g) c = mod_pos(c, p);
    g = zp_trim(std::move(g));
    check(!g.empty() && g.back() == 1, "hensel_lift_factor: g must be monic");
    ZPoly h = zp_quo_monic(f, g, p);
    check(zp_trim(zp_sub_mod(f, zp_mul_mod(g, h, p), p)).empty(),
          "hensel_lift_factor: g does not divide f mod p");

    // Bezout a*g + b*h = 1 over F_p
    auto ext_gcd = [&](PolyModP A, PolyModP B) {
        PolyModP s0, s1, t0, t1;
        s0.p = s1.p = t0.p = t1.p = pl;
        s0.c = {1};
        t1.c = {1};
        while (B.deg() >= 0) {
            PolyModP q;
            q.p = pl;
            PolyModP r = A;
            int db = B.deg();
            unsigned long binv = invmod(Int(B.c[db]), p).get_ui();
            q.c.assign(std::max(A.deg() - db + 1, 1), 0);
            while (r.deg() >= db) {
                int dr = r.deg();
                unsigned long c0 = static_cast<unsigned long>((__uint128_t)r.c[dr] * binv % pl);
                q.c[dr - db] = c0;
                for (int i = 0; i <= db; ++i) {
                    unsigned long sub = static_cast<unsigned long>((__uint128_t)c0 * B.c[i] % pl);
                    r.c[dr - db + i] = (r.c[dr - db + i] + pl - sub) % pl;
                }
                r.trim();
            }
            PolyModP qs = polyp_mul(q, s1), qt = polyp_mul(q, t1);
            PolyModP ns = s0, nt = t0;
            ns.c.resize(std::max(ns.c.size(), qs.c.size()), 0);
            for (std::size_t i = 0; i < qs.c.size(); ++i) ns.c[i] = (ns.c[i] + pl - qs.c[i]) % pl;
            ns.trim();
            nt.c.resize(std::max(nt.c.size(), qt.c.size()), 0);
            for (std::size_t i = 0; i < qt.c.size(); ++i) nt.c[i] = (nt.c[i] + pl - qt.c[i]) % pl;
            nt.trim();
            A = B;
            B = r;
            s0 = s1;
            s1 = ns;
            t0 = t1;
            t1 = nt;
        }
        check(A.deg() == 0, "hensel_lift_factor: factors not coprime mod p");
        unsigned long ainv = invmod(Int(A.c[0]), p).get_ui();
        for (auto& x : s0.c) x = static_cast<unsigned long>((__uint128_t)x * ainv % pl);
        for (auto& x : t0.c) x = static_cast<unsigned long>((__uint128_t)x * ainv % pl);
        return std::make_pair(s0, t0);
    };
    auto [ap, bp] = ext_gcd(poly_reduce_mod(g, pl), poly_reduce_mod(h, pl));
    ZPoly a(ap.c.size()), b(bp.c.size());
    for (std::size_t i = 0; i < ap.c.size(); ++i) a[i] = Int(ap.c[i]);
    for (std::size_t i = 0; i < bp.c.size(); ++i) b[i] = Int(bp.c[i]);

    // linear lifting: f = g*h + p^k e; fix with s = b*e mod g, t = (e - h*s)/g
    for (unsigned long k = 1; k < N; ++k) {
        Int pk = pow_int(p, k);
        Int pk1 = pk * p;
        ZPoly diff = zp_sub_mod(f, zp_mul_mod(g, h, pk1), pk1);
        ZPoly e;
        for (auto& c : diff) {
            check(mpz_divisible_p(c.get_mpz_t(), pk.get_mpz_t()), "hensel lift drift");
            e.push_back(c / pk);
        }
        e = zp_trim(std::move(e));
        if (e.empty()) continue;
        ZPoly s = zp_rem_monic(zp_mul_mod(b, e, p), g, p);
        ZPoly t = zp_quo_monic(zp_sub_mod(e, zp_mul_mod(h, s, p), p), g, p);
        g.resize(std::max(g.size(), s.size()), Int(0));
        for (std::size_t i = 0; i < g.size(); ++i) {
            Int add = (i < s.size()) ? pk * s[i] : Int(0);
            g[i] = mod_pos(g[i] + add, pk1);
        }
        h.resize(std::max(h.size(), t.size()), Int(0));
        for (std::size_t i = 0; i < h.size(); ++i) {
            Int add = (i < t.size()) ? pk * t[i] : Int(0);
            h[i] = mod_pos(h[i] + add, pk1);
        }
        g = zp_trim(std::move(g));
        h = zp_trim(std::move(h));
    }
    Int pn = pow_int(p, N);
    check(zp_trim(zp_sub_mod(f, zp_mul_mod(g, h, pn), pn)).empty(), "hensel lift failed");
    return g;
}

// ---------- LocalRing ----------

LocalRing LocalRing::zp(const Int& p, unsigned long N) {
    LocalRing r;
    r.p = p;
    r.N = N;
    r.f = 1;
    r.pN = pow_int(p, N);
    return r;
}

LocalRing LocalRing::galois(const Int& p, unsigned long N, ZPoly modulus) {
    LocalRing r;
    r.p = p;
    r.N = N;
    r.f = static_cast<unsigned>(modulus.size() - 1);
    r.pN = pow_int(p, N);
    r.modulus = std::move(modulus);
    check(r.f >= 1 && r.modulus.back() == 1, "galois ring: modulus must be monic");
    return r;
}

LocalRing::Elt LocalRing::one() const {
    Elt e(f, Int(0));
    e[0] = 1;
    return e;
}

LocalRing::Elt LocalRing::from_int(const Int& x) const {
    Elt e(f, Int(0));
    e[0] = mod_pos(x, pN);
    return e;
}

LocalRing::Elt LocalRing::add(const Elt& a, const Elt& b) const {
    Elt r(f);
    for (unsigned i = 0; i < f; ++i) r[i] = mod_pos(a[i] + b[i], pN);
    return r;
}

LocalRing::Elt LocalRing::sub(const Elt& a, const Elt& b) const {
    Elt r(f);
    for (unsigned i = 0; i < f; ++i) r[i] = mod_pos(a[i] - b[i], pN);
    return r;
}

LocalRing::Elt LocalRing::neg(const Elt& a) const {
    Elt r(f);
    for (unsigned i = 0; i < f; ++i) r[i] = mod_pos(-a[i], pN);
    return r;
}

LocalRing::Elt LocalRing::mul(const Elt& a, const Elt& b) const {
    if (f == 1) return Elt{mod_pos(a[0] * b[0], pN)};
    ZPoly prod(2 * f - 1, Int(0));
    for (unsigned i = 0; i < f; ++i) {
        if (a[i] == 0) continue;
        for (unsigned j = 0; j < f; ++j) prod[i + j] = mod_pos(prod[i + j] + a[i] * b[j], pN);
    }
    for (std::size_t d = prod.size(); d-- > f;) {
        Int lead = prod[d];
        if (lead == 0) continue;
        for (unsigned i = 0; i < f; ++i)
            prod[d - f + i] = mod_pos(prod[d - f + i] - lead * modulus[i], pN);
        prod[d] = 0;
    }
    Elt r(f);
    for (unsigned i = 0; i < f; ++i) r[i] = prod[i];
    return r;
}

LocalRing::Elt LocalRing::mul_int(const Elt& a, const Int& c) const {
    Elt r(f);
    for (unsigned i = 0; i < f; ++i) r[i] = mod_pos(a[i] * c, pN);
    return r;
}

LocalRing::Elt LocalRing::pow(Elt a, Int e) const {
    Elt r = one();
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = mul(r, a);
        e >>= 1;
        if (e > 0) a = mul(a, a);
    }
    return r;
}

bool LocalRing::is_zero(const Elt& a) const {
    for (const auto& x : a)
        if (x != 0) return false;
    return true;
}

bool LocalRing::is_unit(const Elt& a) const {
    for (const auto& x : a)
        if (x != 0 && !mpz_divisible_p(x.get_mpz_t(), p.get_mpz_t())) return true;
    return false;
}

bool LocalRing::eq(const Elt& a, const Elt& b) const { return a == b; }

unsigned long LocalRing::val(const Elt& a) const {
    unsigned long v = N;
    for (const auto& x : a) {
        if (x == 0) continue;
        v = std::min(v, valuation(x, p));
        if (v == 0) break;
    }
    return v;
}

LocalRing::Elt LocalRing::div_pow_p(const Elt& a, unsigned long k) const {
    Int pk = pow_int(p, k);
    Elt r(f);
    for (unsigned i = 0; i < f; ++i) {
        check(mpz_divisible_p(a[i].get_mpz_t(), pk.get_mpz_t()), "div_pow_p: not divisible");
        r[i] = a[i] / pk;
    }
    return r;
}

LocalRing::Elt LocalRing::inv(const Elt& a) const {
    check(is_unit(a), "LocalRing::inv of non-unit");
    if (f == 1) return Elt{invmod(a[0], pN)};
    Int order = pow_int(p, f * (N - 1)) * (pow_int(p, f) - 1);
    Elt r = pow(a, order - 1);
    check(eq(mul(r, a), one()), "LocalRing::inv failed");
    return r;
}

std::optional<LocalRing::Elt> LocalRing::sqrt(const Elt& a) const {
    if (is_zero(a)) return zero();
    unsigned long v = val(a);
    if (v % 2 == 1) return std::nullopt;
    if (v > 0) {
        auto s = sqrt(div_pow_p(a, v));
        if (!s) return std::nullopt;
        return mul_int(*s, pow_int(p, v / 2));
    }
    if (p == 2) {
        unsigned long base_prec = std::min<unsigned long>(3, N);
        Int p3 = pow_int(p, base_prec);
        Elt x;
        bool found = false;
        std::vector<Int> idx(f, Int(0));
        while (true) {
            Elt cand(idx.begin(), idx.end());
            Elt sq = mul(cand, cand);
            bool ok = true;
            for (unsigned i = 0; i < f; ++i)
                if (mod_pos(sq[i] - a[i], p3) != 0) {
                    ok = false;
                    break;
                }
            if (ok && is_unit(cand)) {
                x = cand;
                found = true;
                break;
            }
            unsigned i = 0;
            for (; i < f; ++i) {
                idx[i] += 1;
                if (idx[i] < p3) break;
                idx[i] = 0;
            }
            if (i == f) break;
        }
        if (!found) return std::nullopt;
        for (unsigned long k = base_prec; k < N; ++k) {
            Elt diff = sub(a, mul(x, x));
            if (is_zero(diff)) break;
            unsigned long dv = val(diff);
            if (dv >= N) break;
            check(dv >= k, "2-adic sqrt lift drift");
            if (dv > k) continue;
            Elt e = div_pow_p(diff, k);
            Elt t = mul(e, inv(x));
            Elt t2(f);
            for (unsigned i = 0; i < f; ++i) t2[i] = mod_pos(t[i], Int(2));
            x = add(x, mul_int(t2, pow_int(p, k - 1)));
        }
        if (!is_zero(sub(mul(x, x), a))) return std::nullopt;
        return x;
    }
    // odd p: residue-field square root, then Newton
    Int q = pow_int(p, f);
    LocalRing rf = (f == 1) ? LocalRing::zp(p, 1) : LocalRing::galois(p, 1, modulus);
    Elt a0(f);
    for (unsigned i = 0; i < f; ++i) a0[i] = mod_pos(a[i], p);
    if (!rf.eq(rf.pow(a0, (q - 1) / 2), rf.one())) return std::nullopt;
    check(q.fits_ulong_p() && q.get_ui() <= (1ul << 20), "residue field too large for sqrt scan");
    Elt x;
    bool found = false;
    std::vector<Int> idx(f, Int(0));
    while (true) {
        Elt cand(idx.begin(), idx.end());
        if (rf.eq(rf.mul(cand, cand), a0)) {
            x = cand;
            found = true;
            break;
        }
        unsigned i = 0;
        for (; i < f; ++i) {
            idx[i] += 1;
            if (idx[i] < p) break;
            idx[i] = 0;
        }
        if (i == f) break;
    }
    if (!found) return std::nullopt;
    unsigned long k = 1;
    while (k < N) {
        k = std::min(2 * k, N);
        Elt num = sub(mul(x, x), a);
        Elt den = mul_int(x, Int(2));
        x = sub(x, mul(num, inv(den)));
    }
    if (!is_zero(sub(mul(x, x), a))) return std::nullopt;
    return x;
}

LocalRing::Elt LocalRing::embed_power(const QVec& power_coords, const Elt& theta_image) const {
    Int den = 1;
    for (const auto& c : power_coords) {
        Int d = c.get_den();
        den = den / gcd(den, d) * d;
    }
    unsigned long vden =
        (den != 1 && mpz_divisible_p(den.get_mpz_t(), p.get_mpz_t())) ? valuation(den, p) : 0;
    check(vden <= 8, "embed_power: denominator p-valuation too large");
    LocalRing big = *this;
    if (vden > 0) {
        big.N = N + vden;
        big.pN = pow_int(p, big.N);
    }
    Elt acc = big.zero();
    Elt th = theta_image;
    th.resize(f, Int(0));
    for (std::size_t i = power_coords.size(); i-- > 0;) {
        Rat c = power_coords[i] * Rat(den);
        check(c.get_den() == 1, "embed_power: denominator clearing failed");
        acc = big.add(big.mul(acc, th), big.from_int(c.get_num()));
    }
    Elt r(f);
    Int pv = pow_int(p, vden);
    Int den_unit = den / pv;
    Int inv_du = invmod(mod_pos(den_unit, pN), pN);
    for (unsigned i = 0; i < f; ++i) {
        check(mpz_divisible_p(acc[i].get_mpz_t(), pv.get_mpz_t()),
              "embed_power: element not integral at the prime");
        r[i] = mod_pos((acc[i] / pv) * inv_du, pN);
    }
    return r;
}

LocalRing::Elt LocalRing::reduce_precision(const Elt& a, unsigned long N2) const {
    Int m = pow_int(p, N2);
    Elt r(f);
    for (unsigned i = 0; i < f; ++i) r[i] = mod_pos(a[i], m);
    return r;
}

// ---------- Howell form ----------

namespace {

struct HowellWork {
    const LocalRing& R;
    LMat rows;
    LMat transform;  // width = original row count

    void add_mul(std::size_t dst, std::size_t src, const LocalRing::Elt& c) {
        for (std::size_t j = 0; j < rows[dst].size(); ++j)
            rows[dst][j] = R.add(rows[dst][j], R.mul(c, rows[src][j]));
        for (std::size_t j = 0; j < transform[dst].size(); ++j)
            transform[dst][j] = R.add(transform[dst][j], R.mul(c, transform[src][j]));
    }
    void scale(std::size_t i, const LocalRing::Elt& c) {
        for (auto& x : rows[i]) x = R.mul(c, x);
        for (auto& x : transform[i]) x = R.mul(c, x);
    }
    bool row_zero(std::size_t i) const {
        for (const auto& x : rows[i])
            if (!R.is_zero(x)) return false;
        return true;
    }
};

HowellWork howellize(const LocalRing& R, const LMat& a) {
    std::size_t nrows = a.size();
    std::size_t ncols = a.empty() ? 0 : a[0].size();
    HowellWork w{R, a, {}};
    w.transform.assign(nrows, std::vector<LocalRing::Elt>(nrows, R.zero()));
    for (std::size_t i = 0; i < nrows; ++i) w.transform[i][i] = R.one();

    std::size_t r = 0;
    for (std::size_t c = 0; c < ncols && r < w.rows.size(); ++c) {
        std::size_t best = w.rows.size();
        unsigned long best_v = R.N + 1;
        for (std::size_t i = r; i < w.rows.size(); ++i) {
            if (R.is_zero(w.rows[i][c])) continue;
            unsigned long v = R.val(w.rows[i][c]);
            if (v < best_v) {
                best_v = v;
                best = i;
            }
        }
        if (best == w.rows.size()) continue;
        std::swap(w.rows[best], w.rows[r]);
        std::swap(w.transform[best], w.transform[r]);
        unsigned long v = R.val(w.rows[r][c]);
        w.scale(r, R.inv(R.div_pow_p(w.rows[r][c], v)));
        for (std::size_t i = r + 1; i < w.rows.size(); ++i) {
            if (R.is_zero(w.rows[i][c])) continue;
            w.add_mul(i, r, R.neg(R.div_pow_p(w.rows[i][c], v)));
        }
        if (v > 0) {
            // Howell closure: p^{N-v} * row has leading zero but still
            // contributes to later columns
            std::size_t n = w.rows.size();
            w.rows.push_back(w.rows[r]);
            w.transform.push_back(w.transform[r]);
            Int ann = pow_int(R.p, R.N - v);
            for (auto& x : w.rows[n]) x = R.mul_int(x, ann);
            for (auto& x : w.transform[n]) x = R.mul_int(x, ann);
        }
        for (std::size_t i = 0; i < r; ++i) {
            if (R.is_zero(w.rows[i][c])) continue;
            if (R.val(w.rows[i][c]) >= v) w.add_mul(i, r, R.neg(R.div_pow_p(w.rows[i][c], v)));
        }
        ++r;
    }
    return w;
}

}  // namespace

LMat howell_left_kernel(const LocalRing& R, const LMat& a) {
    HowellWork w = howellize(R, a);
    LMat ker;
    for (std::size_t i = 0; i < w.rows.size(); ++i)
        if (w.row_zero(i)) ker.push_back(w.transform[i]);
    return ker;
}

LMat howell_solve_left(const LocalRing& R, const LMat& a, const LMat& targets) {
    HowellWork w = howellize(R, a);
    std::size_t ncols = a.empty() ? 0 : a[0].size();
    struct Piv {
        std::size_t row, col;
        unsigned long v;
    };
    std::vector<Piv> pivots;
    for (std::size_t i = 0; i < w.rows.size(); ++i) {
        std::size_t c = 0;
        while (c < ncols && R.is_zero(w.rows[i][c])) ++c;
        if (c < ncols) pivots.push_back({i, c, R.val(w.rows[i][c])});
    }
    std::sort(pivots.begin(), pivots.end(), [](const Piv& a2, const Piv& b2) {
        if (a2.col != b2.col) return a2.col < b2.col;
        return a2.v < b2.v;
    });
    LMat out;
    std::size_t width = w.transform.empty() ? 0 : w.transform[0].size();
    for (const auto& t : targets) {
        std::vector<LocalRing::Elt> residual = t;
        std::vector<LocalRing::Elt> combo(width, R.zero());
        for (const auto& piv : pivots) {
            const auto& e = residual[piv.col];
            if (R.is_zero(e)) continue;
            unsigned long ve = R.val(e);
            if (ve < piv.v) throw error("target outside image");
            LocalRing::Elt coef = R.div_pow_p(e, piv.v);
            for (std::size_t j = 0; j < ncols; ++j)
                residual[j] = R.sub(residual[j], R.mul(coef, w.rows[piv.row][j]));
            for (std::size_t j = 0; j < width; ++j)
                combo[j] = R.add(combo[j], R.mul(coef, w.transform[piv.row][j]));
        }
        for (const auto& x : residual)
            if (!R.is_zero(x)) throw error("target outside image");
        out.push_back(std::move(combo));
    }
    return out;
}

ZMat howell_left_kernel_z(const Int& p, unsigned long N, const ZMat& a) {
    LocalRing R = LocalRing::zp(p, N);
    LMat am(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (const auto& x : a[i]) am[i].push_back(R.from_int(x));
    LMat k = howell_left_kernel(R, am);
    ZMat out;
    for (auto& row : k) {
        ZVec r;
        for (auto& e : row) r.push_back(e[0]);
        out.push_back(std::move(r));
    }
    return out;
}

std::pair<ZMat, ZMat> howell_solve_z(const Int& p, unsigned long N, const ZMat& l,
                                     const ZMat& z) {
    LocalRing R = LocalRing::zp(p, N);
    auto lift = [&](const ZMat& m) {
        LMat out(m.size());
        for (std::size_t i = 0; i < m.size(); ++i)
            for (const auto& x : m[i]) out[i].push_back(R.from_int(x));
        return out;
    };
    LMat lm = lift(l);
    ZMat kernel;
    for (auto& row : howell_left_kernel(R, lm)) {
        ZVec r;
        for (auto& e : row) r.push_back(e[0]);
        kernel.push_back(std::move(r));
    }
    ZMat sols;
    for (auto& row : howell_solve_left(R, lm, lift(z))) {
        ZVec r;
        for (auto& e : row) r.push_back(e[0]);
        sols.push_back(std::move(r));
    }
    return {kernel, sols};
}

// ---------- 2x2 helpers / splitting embed ----------

Mat2z mat2_mul(const Mat2z& x, const Mat2z& y, const Int& mod) {
    Mat2z r;
    r.m[0] = mod_pos(x.m[0] * y.m[0] + x.m[1] * y.m[2], mod);
    r.m[1] = mod_pos(x.m[0] * y.m[1] + x.m[1] * y.m[3], mod);
    r.m[2] = mod_pos(x.m[2] * y.m[0] + x.m[3] * y.m[2], mod);
    r.m[3] = mod_pos(x.m[2] * y.m[1] + x.m[3] * y.m[3], mod);
    return r;
}

Int mat2_det(const Mat2z& x, const Int& mod) {
    return mod_pos(x.m[0] * x.m[3] - x.m[1] * x.m[2], mod);
}

Mat2z SplittingMap::embed(const ZVec& order_coords, unsigned long N) const {
    check(N <= n_cap, "SplittingMap::embed beyond cached precision");
    check(order_coords.size() == images.size(), "embed: coordinate size mismatch");
    Int mod = pow_int(site.p, N);
    Mat2z out;
    for (auto& e : out.m) e = 0;
    for (std::size_t k = 0; k < images.size(); ++k) {
        if (order_coords[k] == 0) continue;
        for (int t = 0; t < 4; ++t) out.m[t] += order_coords[k] * images[k].m[t];
    }
    for (auto& e : out.m) e = mod_pos(e, mod);
    return out;
}

}  // namespace btq
