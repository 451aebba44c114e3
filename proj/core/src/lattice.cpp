#include "btq/lattice.hpp"

#include <algorithm>

namespace btq {

namespace {

// One elimination pass: bring `rows` (and optional transform `u`) to row
// echelon form over Z with GCD pivoting; does not normalize above pivots.
void echelon(ZMat& rows, ZMat* u) {
    std::size_t nr = rows.size();
    std::size_t nc = rows.empty() ? 0 : rows[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < nc && r < nr; ++c) {
        // eliminate column c below row r by repeated remainder steps
        while (true) {
            std::size_t piv = nr;
            for (std::size_t i = r; i < nr; ++i) {
                if (rows[i][c] == 0) continue;
                if (piv == nr || abs(rows[i][c]) < abs(rows[piv][c])) piv = i;
            }
            if (piv == nr) break;
            std::swap(rows[piv], rows[r]);
            if (u) std::swap((*u)[piv], (*u)[r]);
            bool clean = true;
            for (std::size_t i = r + 1; i < nr; ++i) {
                if (rows[i][c] == 0) continue;
                Int q = rows[i][c] / rows[r][c];  // truncated division is fine
                if (q != 0) {
                    for (std::size_t j = 0; j < nc; ++j) rows[i][j] -= q * rows[r][j];
                    if (u)
                        for (std::size_t j = 0; j < (*u)[i].size(); ++j)
                            (*u)[i][j] -= q * (*u)[r][j];
                }
                if (rows[i][c] != 0) clean = false;
            }
            if (clean) break;
        }
        if (rows[r][c] != 0) ++r;
    }
}

void normalize_hnf(ZMat& rows, ZMat* u) {
    // make pivots positive, reduce entries above pivots
    std::size_t nc = rows.empty() ? 0 : rows[0].size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::size_t c = 0;
        while (c < nc && rows[i][c] == 0) ++c;
        if (c == nc) continue;
        if (rows[i][c] < 0) {
            for (auto& x : rows[i]) x = -x;
            if (u)
                for (auto& x : (*u)[i]) x = -x;
        }
        for (std::size_t k = 0; k < i; ++k) {
            if (rows[k][c] == 0) continue;
            Int q;
            mpz_fdiv_q(q.get_mpz_t(), rows[k][c].get_mpz_t(), rows[i][c].get_mpz_t());
            if (q != 0) {
                for (std::size_t j = 0; j < nc; ++j) rows[k][j] -= q * rows[i][j];
                if (u)
                    for (std::size_t j = 0; j < (*u)[k].size(); ++j)
                        (*u)[k][j] -= q * (*u)[i][j];
            }
        }
    }
}

}  // namespace

ZMat hnf(ZMat rows) {
    echelon(rows, nullptr);
    normalize_hnf(rows, nullptr);
    while (!rows.empty()) {
        bool zero = true;
        for (const auto& x : rows.back())
            if (x != 0) {
                zero = false;
                break;
            }
        if (!zero) break;
        rows.pop_back();
    }
    return rows;
}

IntLattice hnf_lattice(ZMat rows) { return IntLattice{hnf(std::move(rows))}; }

HnfTransform hnf_transform(ZMat rows) {
    std::size_t n = rows.size();
    ZMat u(n, ZVec(n, Int(0)));
    for (std::size_t i = 0; i < n; ++i) u[i][i] = 1;
    echelon(rows, &u);
    normalize_hnf(rows, &u);
    return {std::move(rows), std::move(u)};
}

ZMat kernel_z(const ZMat& a) {
    HnfTransform t = hnf_transform(a);
    ZMat ker;
    for (std::size_t i = 0; i < t.h.size(); ++i) {
        bool zero = true;
        for (const auto& x : t.h[i])
            if (x != 0) {
                zero = false;
                break;
            }
        if (zero) ker.push_back(t.u[i]);
    }
    return hnf(std::move(ker));
}

ZVec hnf_reduce(const ZMat& h, ZVec v) {
    std::size_t nc = v.size();
    for (const auto& row : h) {
        std::size_t c = 0;
        while (c < nc && row[c] == 0) ++c;
        if (c == nc) continue;
        if (v[c] == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), v[c].get_mpz_t(), row[c].get_mpz_t());
        if (q != 0)
            for (std::size_t j = 0; j < nc; ++j) v[j] -= q * row[j];
    }
    return v;
}

bool hnf_member(const ZMat& h, const ZVec& v) {
    ZVec r = hnf_reduce(h, v);
    for (const auto& x : r)
        if (x != 0) return false;
    return true;
}

ZMat lattice_intersect(const ZMat& a, const ZMat& b) {
    // rows (y | z) with y*a = z*b give intersection vectors y*a
    std::size_t m = a.empty() ? (b.empty() ? 0 : b[0].size()) : a[0].size();
    ZMat stacked;
    for (const auto& r : a) stacked.push_back(r);
    for (const auto& r : b) {
        ZVec neg(r.size());
        for (std::size_t j = 0; j < r.size(); ++j) neg[j] = -r[j];
        stacked.push_back(neg);
    }
    ZMat ker = kernel_z(stacked);
    ZMat out;
    for (const auto& k : ker) {
        ZVec v(m, Int(0));
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < m; ++j) v[j] += k[i] * a[i][j];
        out.push_back(std::move(v));
    }
    return hnf(std::move(out));
}

std::optional<ZVec> solve_in_span(const ZMat& rows, const ZVec& target) {
    HnfTransform t = hnf_transform(rows);
    ZVec v = target;
    ZVec combo(rows.size(), Int(0));
    std::size_t nc = v.size();
    for (std::size_t i = 0; i < t.h.size(); ++i) {
        std::size_t c = 0;
        while (c < nc && t.h[i][c] == 0) ++c;
        if (c == nc) continue;
        if (v[c] == 0) continue;
        if (!mpz_divisible_p(v[c].get_mpz_t(), t.h[i][c].get_mpz_t())) return std::nullopt;
        Int q = v[c] / t.h[i][c];
        for (std::size_t j = 0; j < nc; ++j) v[j] -= q * t.h[i][j];
        for (std::size_t j = 0; j < combo.size(); ++j) combo[j] += q * t.u[i][j];
    }
    for (const auto& x : v)
        if (x != 0) return std::nullopt;
    return combo;
}

Int hnf_det(const ZMat& h) {
    check(!h.empty() && h.size() == h[0].size(), "hnf_det: not square");
    Int d = 1;
    for (std::size_t i = 0; i < h.size(); ++i) d *= h[i][i];
    return abs(d);
}

Rat gram_value(const GramForm& gram, const ZVec& v) {
    Rat total = 0;
    std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] == 0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (v[j] == 0) continue;
            total += Rat(v[i] * v[j]) * gram.g[i][j];
        }
    }
    return total;
}

namespace {

// Integral inner products of coordinate rows against a scaled-integral Gram.
Int dot_g(const ZVec& a, const ZVec& b, const ZMat& g) {
    Int total = 0;
    std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] == 0) continue;
        Int partial = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (b[j] == 0) continue;
            partial += g[i][j] * b[j];
        }
        total += a[i] * partial;
    }
    return total;
}

ZMat clear_gram(const QMat& g) {
    Int den = 1;
    for (const auto& row : g)
        for (const auto& x : row) {
            Int d = x.get_den();
            den = den / gcd(den, d) * d;
        }
    ZMat out(g.size(), ZVec(g.empty() ? 0 : g[0].size()));
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g[i].size(); ++j) {
            Rat v = g[i][j] * Rat(den);
            check(v.get_den() == 1, "clear_gram");
            out[i][j] = v.get_num();
        }
    return out;
}

}  // namespace

// Integral LLL (de Weger / Cohen Alg. 2.6.7) on coordinate rows against an
// ambient integral Gram.
ZMat lll(ZMat rows, const GramForm& gram, const Rat& delta) {
    if (rows.size() <= 1) return rows;
    ZMat g = clear_gram(gram.g);
    const std::size_t n = rows.size();
    const Int dnum = delta.get_num(), dden = delta.get_den();

    std::vector<Int> d(n + 1);
    d[0] = 1;
    ZMat lam(n, ZVec(n, Int(0)));

    auto gram_line = [&](std::size_t i) {
        // incremental Gram-Schmidt bookkeeping for row i
        for (std::size_t j = 0; j <= i; ++j) {
            Int u = dot_g(rows[i], rows[j], g);
            for (std::size_t t = 0; t < j; ++t) u = (d[t + 1] * u - lam[i][t] * lam[j][t]) / d[t];
            if (j < i)
                lam[i][j] = u;
            else {
                d[i + 1] = u;
                check(u > 0, "lll: Gram not positive definite on the span");
            }
        }
    };
    for (std::size_t i = 0; i < n; ++i) gram_line(i);

    auto red = [&](std::size_t k, std::size_t l) {
        if (2 * abs(lam[k][l]) <= d[l + 1]) return;
        Int q;
        // nearest integer to lam/d
        Int num = 2 * lam[k][l] + d[l + 1];
        Int den2 = 2 * d[l + 1];
        mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den2.get_mpz_t());
        for (std::size_t j = 0; j < rows[k].size(); ++j) rows[k][j] -= q * rows[l][j];
        lam[k][l] -= q * d[l + 1];
        for (std::size_t t = 0; t < l; ++t) lam[k][t] -= q * lam[l][t];
    };

    std::size_t k = 1;
    while (k < n) {
        red(k, k - 1);
        // Lovasz: swap iff dden*(d[k+1]*d[k-1] + lam^2) < dnum*d[k]^2
        if (dden * (d[k + 1] * d[k - 1] + lam[k][k - 1] * lam[k][k - 1]) < dnum * d[k] * d[k]) {
            std::swap(rows[k], rows[k - 1]);
            for (std::size_t t = 0; t + 1 < k; ++t) std::swap(lam[k][t], lam[k - 1][t]);
            Int lkk = lam[k][k - 1];
            Int bnew = (d[k - 1] * d[k + 1] + lkk * lkk) / d[k];
            for (std::size_t i = k + 1; i < n; ++i) {
                Int t = lam[i][k - 1];
                lam[i][k - 1] = (t * lkk + lam[i][k] * d[k - 1]) / d[k];
                lam[i][k] = (t * d[k + 1] - lam[i][k] * lkk) / d[k];
            }
            d[k] = bnew;
            if (k > 1) --k;
        } else {
            for (std::size_t l = k; l-- > 0;) red(k, l);
            ++k;
        }
    }
    return rows;
}

std::vector<std::pair<Rat, ZVec>> short_vectors_valued(const ZMat& rows, const GramForm& gram,
                                                       const Rat& bound) {
    std::vector<std::pair<Rat, ZVec>> out;
    if (rows.empty() || bound < 0) return out;
    ZMat red = lll(rows, gram);
    const std::size_t n = red.size();

    // rational Gram of the reduced basis
    QMat a(n, QVec(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Rat s = 0;
            for (std::size_t t = 0; t < red[i].size(); ++t) {
                if (red[i][t] == 0) continue;
                for (std::size_t u = 0; u < red[j].size(); ++u) {
                    if (red[j][u] == 0) continue;
                    s += Rat(red[i][t] * red[j][u]) * gram.g[t][u];
                }
            }
            a[i][j] = s;
        }

    // Cholesky-like decomposition: Q(x) = sum_i D[i] (x_i + sum_{j>i} L[i][j] x_j)^2
    QMat l = qmat_identity(n);
    QVec dd(n);
    {
        QMat w = a;
        for (std::size_t i = 0; i < n; ++i) {
            dd[i] = w[i][i];
            check(dd[i] > 0, "short_vectors: form not positive definite");
            for (std::size_t j = i + 1; j < n; ++j) l[i][j] = w[i][j] / w[i][i];
            for (std::size_t j = i + 1; j < n; ++j)
                for (std::size_t t = i + 1; t < n; ++t) w[j][t] -= w[j][i] * w[i][t] / w[i][i];
        }
    }

    // depth-first enumeration from the last coordinate down
    ZVec x(n, Int(0));
    QVec center(n, Rat(0));   // c_i = sum_{j>i} L[i][j] x_j
    QVec remain(n, Rat(0));   // budget left at level i
    std::vector<Int> lo(n), hi(n);

    auto compute_center = [&](std::size_t i) {
        Rat c = 0;
        for (std::size_t j = i + 1; j < n; ++j)
            if (x[j] != 0) c += l[i][j] * Rat(x[j]);
        center[i] = c;
    };

    std::size_t level = n - 1;
    remain[level] = bound;
    compute_center(level);
    lo[level] = ceil_minus_sqrt(-center[level], remain[level] / dd[level]);
    hi[level] = floor_plus_sqrt(-center[level], remain[level] / dd[level]);
    x[level] = lo[level] - 1;

    while (true) {
        ++x[level];
        if (x[level] > hi[level]) {
            if (level == n - 1) break;
            ++level;
            continue;
        }
        Rat term = Rat(x[level]) + center[level];
        Rat used = dd[level] * term * term;
        if (used > remain[level]) continue;  // guard (interval endpoints exact anyway)
        if (level == 0) {
            bool zero = true;
            for (const auto& xi : x)
                if (xi != 0) {
                    zero = false;
                    break;
                }
            if (zero) continue;
            ZVec v(red[0].size(), Int(0));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < v.size(); ++j) v[j] += x[i] * red[i][j];
            // canonical sign: first nonzero ambient coordinate positive
            for (const auto& c : v) {
                if (c == 0) continue;
                if (c < 0)
                    for (auto& y : v) y = -y;
                break;
            }
            Rat val = bound - (remain[0] - used);
            out.emplace_back(val, std::move(v));
            continue;
        }
        std::size_t next = level - 1;
        remain[next] = remain[level] - used;
        compute_center(next);
        lo[next] = ceil_minus_sqrt(-center[next], remain[next] / dd[next]);
        hi[next] = floor_plus_sqrt(-center[next], remain[next] / dd[next]);
        x[next] = lo[next] - 1;
        level = next;
    }

    std::sort(out.begin(), out.end(), [](const auto& p, const auto& q) {
        if (p.first != q.first) return p.first < q.first;
        return p.second < q.second;
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());  // +-v both visited
    return out;
}

std::vector<ZVec> short_vectors(const ZMat& rows, const GramForm& gram, const Rat& bound) {
    auto valued = short_vectors_valued(rows, gram, bound);
    std::vector<ZVec> out;
    out.reserve(valued.size());
    for (auto& [v, vec] : valued) out.push_back(std::move(vec));
    return out;
}

}  // namespace btq
