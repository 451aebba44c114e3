#include "btq/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace btq {

// ---------- FieldElement ----------

bool FieldElement::is_zero() const {
    for (const auto& c : coords)
        if (c != 0) return false;
    return true;
}

bool FieldElement::is_integral() const {
    for (const auto& c : coords)
        if (c.get_den() != 1) return false;
    return true;
}

bool FieldElement::is_rational() const {
    for (std::size_t i = 1; i < coords.size(); ++i)
        if (coords[i] != 0) return false;
    return true;
}

Rat FieldElement::rational_value() const {
    check(is_rational(), "element is not rational");
    // omega_0 is 1 in every bundled table; fall back to power coords otherwise
    QVec pc = power_coords();
    for (std::size_t i = 1; i < pc.size(); ++i) check(pc[i] == 0, "element is not rational");
    return pc.empty() ? Rat(0) : pc[0];
}

FieldElement FieldElement::operator+(const FieldElement& o) const {
    check(K == o.K, "field mismatch");
    FieldElement r{K, coords};
    for (std::size_t i = 0; i < coords.size(); ++i) r.coords[i] += o.coords[i];
    return r;
}

FieldElement FieldElement::operator-(const FieldElement& o) const {
    check(K == o.K, "field mismatch");
    FieldElement r{K, coords};
    for (std::size_t i = 0; i < coords.size(); ++i) r.coords[i] -= o.coords[i];
    return r;
}

FieldElement FieldElement::operator-() const {
    FieldElement r{K, coords};
    for (auto& c : r.coords) c = -c;
    return r;
}

FieldElement FieldElement::operator*(const FieldElement& o) const {
    check(K == o.K, "field mismatch");
    std::size_t n = coords.size();
    QVec out(n, Rat(0));
    for (std::size_t i = 0; i < n; ++i) {
        if (coords[i] == 0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (o.coords[j] == 0) continue;
            Rat f = coords[i] * o.coords[j];
            const QVec& row = K->mult_row(i, j);
            for (std::size_t t = 0; t < n; ++t)
                if (row[t] != 0) out[t] += f * row[t];
        }
    }
    return FieldElement{K, std::move(out)};
}

FieldElement FieldElement::operator*(const Rat& q) const {
    FieldElement r{K, coords};
    for (auto& c : r.coords) c *= q;
    return r;
}

namespace {
QMat mult_matrix(const FieldElement& x) {
    std::size_t n = x.coords.size();
    QMat m(n, QVec(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i) {
        // row i = coords of x * omega_i
        for (std::size_t j = 0; j < n; ++j) {
            if (x.coords[j] == 0) continue;
            const QVec& row = x.K->mult_row(j, i);
            for (std::size_t t = 0; t < n; ++t)
                if (row[t] != 0) m[i][t] += x.coords[j] * row[t];
        }
    }
    return m;
}
}  // namespace

FieldElement FieldElement::inverse() const {
    check(!is_zero(), "division by zero");
    // solve y * M_x = e_0-coords-of-1, i.e. y with y*x = 1
    QMat m = mult_matrix(*this);
    QVec one_coords = K->one().coords;
    auto sol = solve_left(m, one_coords);
    check(sol.has_value(), "inverse: singular multiplication matrix");
    return FieldElement{K, *sol};
}

FieldElement FieldElement::operator/(const FieldElement& o) const { return *this * o.inverse(); }

bool FieldElement::operator==(const FieldElement& o) const {
    return K == o.K && coords == o.coords;
}

bool FieldElement::operator<(const FieldElement& o) const { return coords < o.coords; }

Rat FieldElement::norm() const { return qmat_det(mult_matrix(*this)); }

Rat FieldElement::trace() const {
    Rat t = 0;
    const QVec& tv = K->trace_vector();
    for (std::size_t i = 0; i < coords.size(); ++i)
        if (coords[i] != 0) t += coords[i] * tv[i];
    return t;
}

QVec FieldElement::power_coords() const { return qvec_mat(coords, K->omega); }

std::string FieldElement::str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < coords.size(); ++i)
        os << (i ? "," : "") << coords[i].get_str();
    os << "]";
    return os.str();
}

// ---------- NumberField ----------

namespace {

Rat resultant(const QPoly& a, const QPoly& b) {
    int da = qpoly_deg(a), db = qpoly_deg(b);
    check(da >= 0 && db >= 0, "resultant of zero polynomial");
    std::size_t n = static_cast<std::size_t>(da + db);
    QMat s(n, QVec(n, Rat(0)));
    for (int i = 0; i < db; ++i)
        for (int j = 0; j <= da; ++j) s[i][i + j] = a[da - j];
    for (int i = 0; i < da; ++i)
        for (int j = 0; j <= db; ++j) s[db + i][i + j] = b[db - j];
    return qmat_det(s);
}

Rat poly_disc(const ZPoly& f) {
    QPoly fq = qpoly_from_z(f);
    int n = qpoly_deg(fq);
    Rat res = resultant(fq, qpoly_derivative(fq));
    // monic: disc = (-1)^{n(n-1)/2} * res
    if (((n * (n - 1) / 2) % 2) != 0) res = -res;
    return res;
}

// interval Horner evaluation with rational endpoints
std::pair<Rat, Rat> interval_eval(const QPoly& g, const Rat& lo, const Rat& hi) {
    Rat a = 0, b = 0;
    for (std::size_t i = g.size(); i-- > 0;) {
        // [a,b] * [lo,hi]
        Rat p1 = a * lo, p2 = a * hi, p3 = b * lo, p4 = b * hi;
        Rat mn = std::min(std::min(p1, p2), std::min(p3, p4));
        Rat mx = std::max(std::max(p1, p2), std::max(p3, p4));
        a = mn + g[i];
        b = mx + g[i];
    }
    return {a, b};
}

}  // namespace

std::unique_ptr<NumberField> NumberField::create(
    std::string label, ZPoly poly, QMat omega, Int disc, std::vector<QVec> automorphism_images,
    std::map<Int, std::vector<std::pair<QVec, std::pair<unsigned, unsigned>>>> index_primes) {
    auto K = std::make_unique<NumberField>();
    K->label = std::move(label);
    K->poly = std::move(poly);
    check(!K->poly.empty() && K->poly.back() == 1, "defining polynomial must be monic");
    K->degree = static_cast<unsigned>(K->poly.size() - 1);
    check(K->degree >= 1, "degree must be positive");
    const unsigned n = K->degree;
    check(omega.size() == n, "integral basis size mismatch");
    for (auto& row : omega) check(row.size() == n, "integral basis row size mismatch");
    K->omega = std::move(omega);
    K->omega_inv = qmat_inverse(K->omega);
    K->disc = disc;
    K->index_prime_data = std::move(index_primes);

    // index from det(omega) = +-1/index
    Rat det = qmat_det(K->omega);
    check(det != 0, "integral basis not a basis");
    Rat inv_index = abs(det);
    check(inv_index.get_num() == 1, "integral basis must contain the power basis");
    K->zk_index = inv_index.get_den();

    if (n >= 2) {
        Rat df = poly_disc(K->poly);
        check(df.get_den() == 1, "polynomial discriminant not integral");
        check(df.get_num() == disc * K->zk_index * K->zk_index,
              "disc(f) != index^2 * disc for field " + K->label);
    } else {
        check(disc == 1, "degree-1 field must have discriminant 1");
    }

    // totally real check
    if (n >= 2) {
        SturmSequence st(qpoly_from_z(K->poly));
        check(st.count_real_roots() == static_cast<int>(n),
              "defining polynomial is not totally real: " + K->label);
        // irreducibility within reach: no repeated roots + a mod-p certificate
        // attempt; curated tables are the real guarantee at higher degree.
        for (unsigned long p : {2ul, 3ul, 5ul, 7ul, 11ul, 13ul, 17ul, 19ul, 23ul}) {
            PolyModP fp = poly_reduce_mod(K->poly, p);
            if (fp.deg() != static_cast<int>(n) || !polyp_is_squarefree(fp)) continue;
            auto dd = polyp_distinct_degree(fp);
            if (dd.size() == 1 && dd[0].first == n) break;  // certified irreducible
        }
    }

    // multiplication table: omega_i * omega_j reduced mod f, back to omega coords
    auto mul_power = [&](const QVec& a, const QVec& b) {
        QPoly prod(2 * n - 1, Rat(0));
        for (std::size_t i = 0; i < n; ++i) {
            if (a[i] == 0) continue;
            for (std::size_t j = 0; j < n; ++j)
                if (b[j] != 0) prod[i + j] += a[i] * b[j];
        }
        QPoly rem = qpoly_rem(std::move(prod), qpoly_from_z(K->poly));
        QVec out(n, Rat(0));
        for (std::size_t i = 0; i < rem.size(); ++i) out[i] = rem[i];
        return out;
    };
    K->mult_table_.resize(static_cast<std::size_t>(n) * n);
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < n; ++j) {
            QVec prod_power = mul_power(K->omega[i], K->omega[j]);
            QVec prod_omega = qvec_mat(prod_power, K->omega_inv);
            for (const auto& c : prod_omega)
                check(c.get_den() == 1,
                      "integral basis not multiplicatively closed in " + K->label);
            K->mult_table_[i * n + j] = std::move(prod_omega);
        }

    // 1 must lie in O_F with integral coordinates
    {
        QVec one_power(n, Rat(0));
        one_power[0] = 1;
        QVec c = qvec_mat(one_power, K->omega_inv);
        for (const auto& x : c) check(x.get_den() == 1, "1 not integral over basis");
    }

    K->trace_vec_.assign(n, Rat(0));
    for (unsigned j = 0; j < n; ++j) {
        Rat t = 0;
        for (unsigned i = 0; i < n; ++i) t += K->mult_table_[j * n + i][i];
        K->trace_vec_[j] = t;
    }
    K->trace_form_.assign(n, QVec(n, Rat(0)));
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < n; ++j) {
            Rat t = 0;
            const QVec& prod = K->mult_table_[i * n + j];
            for (unsigned u = 0; u < n; ++u)
                if (prod[u] != 0) t += prod[u] * K->trace_vec_[u];
            K->trace_form_[i][j] = t;
        }

    if (n >= 2) K->root_intervals_ = isolate_real_roots(qpoly_from_z(K->poly));

    // automorphisms: validate image is a root of f, build coordinate maps
    for (const auto& img : automorphism_images) {
        check(img.size() == n, "automorphism image size mismatch");
        FieldElement beta = K->element(img);
        // f(beta) == 0
        FieldElement acc = K->from_rational(Rat(K->poly.back()));
        for (std::size_t i = K->poly.size() - 1; i-- > 0;)
            acc = acc * beta + K->from_rational(Rat(K->poly[i]));
        check(acc.is_zero(), "automorphism image is not a root of f in " + K->label);
        QMat a(n, QVec(n));
        for (unsigned i = 0; i < n; ++i) {
            // sigma(omega_i) = g_i(beta) where g_i = power poly of omega_i
            FieldElement v = K->from_rational(K->omega[i][n - 1]);
            for (std::size_t t = n - 1; t-- > 0;)
                v = v * beta + K->from_rational(K->omega[i][t]);
            a[i] = v.coords;
        }
        K->automorphism_mats.push_back(std::move(a));
    }
    return K;
}

FieldElement NumberField::element(QVec omega_coords) const {
    check(omega_coords.size() == degree, "coordinate size mismatch");
    for (auto& c : omega_coords) c.canonicalize();
    return FieldElement{this, std::move(omega_coords)};
}

FieldElement NumberField::from_power_coords(const QVec& power_coords) const {
    check(power_coords.size() == degree, "power coordinate size mismatch");
    return FieldElement{this, qvec_mat(power_coords, omega_inv)};
}

FieldElement NumberField::from_rational(const Rat& q) const {
    QVec pc(degree, Rat(0));
    pc[0] = q;
    return from_power_coords(pc);
}

FieldElement NumberField::zero() const { return FieldElement{this, QVec(degree, Rat(0))}; }
FieldElement NumberField::one() const { return from_rational(Rat(1)); }

FieldElement NumberField::theta() const {
    QVec pc(degree, Rat(0));
    if (degree >= 2)
        pc[1] = 1;
    else
        pc[0] = Rat(-poly[0]);  // root of the linear polynomial
    return from_power_coords(pc);
}

std::vector<int> NumberField::embedding_signs(const FieldElement& x) const {
    check(x.K == this, "field mismatch");
    std::vector<int> signs;
    if (x.is_zero()) return std::vector<int>(degree, 0);
    QVec pc = x.power_coords();
    if (degree == 1) {
        signs.push_back(sgn(pc[0]));
        return signs;
    }
    QPoly g(pc.begin(), pc.end());
    g = qpoly_trim(std::move(g));
    QPoly f = qpoly_from_z(poly);
    for (auto iv : root_intervals_) {
        Rat lo = iv.first, hi = iv.second;
        // f changes sign across the isolating interval; refine until the
        // interval evaluation of g has a definite sign (g(root) != 0 since
        // f is irreducible and deg g < deg f)
        int flo = sgn(qpoly_eval(f, lo));
        while (true) {
            auto [a, b] = interval_eval(g, lo, hi);
            if (a > 0) {
                signs.push_back(1);
                break;
            }
            if (b < 0) {
                signs.push_back(-1);
                break;
            }
            Rat mid = (lo + hi) / 2;
            int fm = sgn(qpoly_eval(f, mid));
            check(fm != 0, "rational root of irreducible polynomial");
            if (fm == flo)
                lo = mid;
            else
                hi = mid;
        }
    }
    return signs;
}

bool NumberField::is_totally_positive(const FieldElement& x) const {
    check(!x.is_zero(), "is_totally_positive: zero element");
    for (int s : embedding_signs(x))
        if (s <= 0) return false;
    return true;
}

FieldElement NumberField::apply_automorphism(std::size_t idx, const FieldElement& x) const {
    check(idx < automorphism_mats.size(), "automorphism index out of range");
    return FieldElement{this, qvec_mat(x.coords, automorphism_mats[idx])};
}

// ---------- prime sites ----------

namespace {

ZMat ideal_lattice_from_gens(const NumberField& K, const std::vector<FieldElement>& gens) {
    ZMat rows;
    const unsigned n = K.degree;
    for (const auto& g : gens) {
        for (unsigned i = 0; i < n; ++i) {
            QVec basis_coords(n, Rat(0));
            basis_coords[i] = 1;
            FieldElement prod = g * K.element(basis_coords);
            ZVec row(n);
            for (unsigned t = 0; t < n; ++t) {
                check(prod.coords[t].get_den() == 1, "ideal generator not integral");
                row[t] = prod.coords[t].get_num();
            }
            rows.push_back(std::move(row));
        }
    }
    return hnf(std::move(rows));
}

// Lift mod-p^k root candidates of f until each lies in a stable Newton
// basin; returns (root, precision, v_p(f'(root))) per branch. Distinct
// candidates can share a basin, so branches are deduplicated by refining
// each root a few more Newton steps.
struct BranchData {
    Int r;
    unsigned prec;
    unsigned c;
};

Int newton_refine(const ZPoly& f, const Int& p, Int s, unsigned long k, unsigned c,
                  unsigned long N) {
    ZPoly fd(f.size() - 1);
    for (std::size_t i = 1; i < f.size(); ++i) fd[i - 1] = f[i] * Int(static_cast<long>(i));
    auto evalz = [](const ZPoly& g, const Int& x, const Int& mod) {
        Int v = 0;
        for (std::size_t i = g.size(); i-- > 0;) v = mod_pos(v * x + g[i], mod);
        return v;
    };
    while (k < N) {
        unsigned long k2 = 2 * (k - c);
        check(k2 > k, "Newton step does not converge");
        if (k2 > N + c) k2 = N + c;
        Int mod = pow_int(p, k2);
        Int pc = pow_int(p, c);
        Int fs = evalz(f, s, mod * pc);
        Int fps = evalz(fd, s, mod * pc);
        check(mpz_divisible_p(fps.get_mpz_t(), pc.get_mpz_t()), "f' valuation changed");
        Int unit = mod_pos(fps / pc, mod);
        check(mpz_divisible_p(fs.get_mpz_t(), pc.get_mpz_t()), "f valuation below c");
        Int corr = mod_pos((fs / pc) * invmod(unit, mod), mod);
        s = mod_pos(s - corr, mod);
        k = k2;
    }
    return mod_pos(s, pow_int(p, N));
}

std::vector<BranchData> stable_branches(const ZPoly& f, const Int& p) {
    ZPoly fd(f.size() - 1);
    for (std::size_t i = 1; i < f.size(); ++i) fd[i - 1] = f[i] * Int(static_cast<long>(i));
    auto evalz = [](const ZPoly& g, const Int& x, const Int& mod) {
        Int v = 0;
        for (std::size_t i = g.size(); i-- > 0;) v = mod_pos(v * x + g[i], mod);
        return v;
    };
    std::vector<BranchData> out;
    std::vector<std::pair<Int, unsigned>> candidates;  // (value, precision)
    Int pk = p;
    for (Int r = 0; r < p; ++r)
        if (evalz(f, r, pk) == 0) candidates.emplace_back(r, 1);
    unsigned guard = 0;
    while (!candidates.empty()) {
        check(++guard < 64, "root branch separation failed");
        std::vector<std::pair<Int, unsigned>> next;
        for (auto& [r, k] : candidates) {
            Int pk1 = pow_int(p, k);
            Int fpv = evalz(fd, r, pk1 * p);
            unsigned c = 0;
            {
                Int t = fpv;
                while (t != 0 && mpz_divisible_p(t.get_mpz_t(), p.get_mpz_t())) {
                    t /= p;
                    ++c;
                }
                if (fpv == 0) c = k + 1;  // undetermined at this precision
            }
            if (c < k && k >= 2 * c + 1) {
                out.push_back({r, k, c});
                continue;
            }
            // branch all lifts to precision k+1
            Int pk2 = pk1 * p;
            for (Int j = 0; j < p; ++j) {
                Int cand = r + j * pk1;
                if (evalz(f, cand, pk2) == 0) next.emplace_back(cand, k + 1);
            }
        }
        candidates = std::move(next);
    }
    // refine and deduplicate basins converging to the same root
    unsigned long refine_to = 4;
    for (const auto& b : out) refine_to = std::max<unsigned long>(refine_to, b.prec + 4);
    std::vector<BranchData> uniq;
    std::vector<Int> seen;
    for (const auto& b : out) {
        Int refined = newton_refine(f, p, b.r, b.prec, b.c, refine_to);
        bool dup = false;
        for (const auto& s : seen)
            if (s == refined) {
                dup = true;
                break;
            }
        if (dup) continue;
        seen.push_back(refined);
        uniq.push_back({refined, static_cast<unsigned>(refine_to), b.c});
    }
    std::sort(uniq.begin(), uniq.end(),
              [](const BranchData& a, const BranchData& b) { return a.r < b.r; });
    return uniq;
}

}  // namespace

Int PrimeSite::root_mod(unsigned long N) const {
    return newton_refine(K->poly, p, r, r_prec, fprime_val, N);
}

Int PrimeSite::embed(const FieldElement& x, unsigned long N) const {
    QVec pc = x.power_coords();
    Int den = 1;
    for (const auto& c : pc) {
        Int d = c.get_den();
        den = den / gcd(den, d) * d;
    }
    unsigned long vden = (den == 1) ? 0 : btq::valuation(den, p);
    Int big = pow_int(p, N + vden);
    Int s = root_mod(N + vden);
    Int val = 0;
    for (std::size_t i = pc.size(); i-- > 0;) {
        Rat c = pc[i] * Rat(den);
        check(c.get_den() == 1, "embed: denominator clearing failed");
        val = mod_pos(val * s + c.get_num(), big);
    }
    Int pv = pow_int(p, vden);
    check(mpz_divisible_p(val.get_mpz_t(), pv.get_mpz_t()),
          "embed: element not integral at the site");
    val /= pv;
    Int den_unit = den / pv;
    Int modN = pow_int(p, N);
    return mod_pos(val * invmod(mod_pos(den_unit, modN), modN), modN);
}

unsigned long PrimeSite::valuation(const FieldElement& x) const {
    check(!x.is_zero(), "valuation of zero");
    QVec pc = x.power_coords();
    Int den = 1;
    for (const auto& c : pc) {
        Int d = c.get_den();
        den = den / gcd(den, d) * d;
    }
    long vden = (den == 1) ? 0 : static_cast<long>(btq::valuation(den, p));
    for (unsigned long N = 16;; N *= 2) {
        Int image = 0;
        Int big = pow_int(p, N);
        Int s = root_mod(N);
        for (std::size_t i = pc.size(); i-- > 0;) {
            Rat c = pc[i] * Rat(den);
            image = mod_pos(image * s + c.get_num(), big);
        }
        if (image != 0) {
            long v = static_cast<long>(btq::valuation(image, p)) - vden;
            check(v >= 0, "negative valuation where nonnegative expected");
            return static_cast<unsigned long>(v);
        }
        check(N <= 4096, "valuation: element numerically indistinguishable from zero");
    }
}

std::string PrimeSite::str() const {
    std::ostringstream os;
    os << "(" << p.get_str() << "," << gen.str() << ")";
    return os.str();
}

std::string PrimeIdeal::str() const {
    std::ostringstream os;
    os << "(" << p.get_str() << "," << gen.str() << ")e" << e << "f" << f;
    return os.str();
}

std::vector<PrimeSite> split_prime(const NumberField& K, const Int& p) {
    std::vector<PrimeSite> sites;
    const unsigned n = K.degree;
    bool index_divisor = mpz_divisible_p(K.zk_index.get_mpz_t(), p.get_mpz_t()) && K.zk_index > 1;
    if (!index_divisor) {
        check(p.fits_ulong_p(), "prime too large");
        PolyModP fp = poly_reduce_mod(K.poly, p.get_ui());
        check(fp.deg() == static_cast<int>(n), "prime divides leading coefficient");
        auto roots = polyp_roots(fp);
        // derivative mod p
        PolyModP fd;
        fd.p = fp.p;
        fd.c.resize(fp.c.size() - 1);
        for (std::size_t i = 1; i < fp.c.size(); ++i)
            fd.c[i - 1] = static_cast<unsigned long>((__uint128_t)fp.c[i] * (i % fp.p) % fp.p);
        for (unsigned long r : roots) {
            unsigned long v = 0;
            for (std::size_t i = fd.c.size(); i-- > 0;)
                v = static_cast<unsigned long>(((__uint128_t)v * r + fd.c[i]) % fp.p);
            if (v == 0) continue;  // ramified branch: not e=f=1
            PrimeSite s;
            s.K = &K;
            s.p = p;
            s.r = Int(r);
            s.r_prec = 1;
            s.fprime_val = 0;
            s.pi = K.from_rational(Rat(p));
            s.gen = K.theta() - K.from_rational(Rat(Int(r)));
            if (n == 1) s.gen = K.from_rational(Rat(p));  // over Q the ideal is (p)
            s.delta = K.zero();
            s.ideal_hnf = ideal_lattice_from_gens(K, {K.from_rational(Rat(p)), s.gen});
            sites.push_back(std::move(s));
        }
        std::sort(sites.begin(), sites.end(),
                  [](const PrimeSite& a, const PrimeSite& b) { return a.r < b.r; });
        return sites;
    }
    auto it = K.index_prime_data.find(p);
    check(it != K.index_prime_data.end(),
          "needs external prime data for index divisor p=" + p.get_str() + " in " + K.label);
    auto branches = stable_branches(K.poly, p);
    for (const auto& [gen_coords, ef] : it->second) {
        if (ef.first != 1 || ef.second != 1) continue;  // only degree-1 unramified sites
        FieldElement gen = K.element(gen_coords);
        ZMat lat = ideal_lattice_from_gens(K, {K.from_rational(Rat(p)), gen});
        // match the branch: v_p(gen(root)) >= 1 exactly for the right one
        const PrimeSite* matched = nullptr;
        PrimeSite s;
        s.K = &K;
        s.p = p;
        s.pi = K.from_rational(Rat(p));
        s.gen = gen;
        s.delta = K.zero();
        s.ideal_hnf = lat;
        for (const auto& br : branches) {
            PrimeSite cand = s;
            cand.r = br.r;
            cand.r_prec = br.prec;
            cand.fprime_val = br.c;
            // evaluate gen at the branch root with generous precision
            QVec pc = gen.power_coords();
            Int den = 1;
            for (const auto& c : pc) {
                Int d = c.get_den();
                den = den / gcd(den, d) * d;
            }
            unsigned long vden = (den == 1) ? 0 : btq::valuation(den, p);
            unsigned long N = vden + 4;
            Int big = pow_int(p, N);
            Int root = cand.root_mod(N);
            Int img = 0;
            for (std::size_t i = pc.size(); i-- > 0;) {
                Rat c = pc[i] * Rat(den);
                img = mod_pos(img * root + c.get_num(), big);
            }
            unsigned long v = (img == 0) ? N : btq::valuation(img, p);
            if (v > vden) {  // gen lies in this branch's prime
                check(matched == nullptr, "branch matching ambiguous for p=" + p.get_str());
                s.r = cand.r;
                s.r_prec = cand.r_prec;
                s.fprime_val = cand.fprime_val;
                matched = &s;
            }
        }
        check(matched != nullptr, "no branch matches table prime data for p=" + p.get_str());
        sites.push_back(s);
    }
    std::sort(sites.begin(), sites.end(),
              [](const PrimeSite& a, const PrimeSite& b) { return a.r < b.r; });
    return sites;
}

std::vector<PrimeIdeal> primes_above(const NumberField& K, const Int& p) {
    std::vector<PrimeIdeal> out;
    bool index_divisor = mpz_divisible_p(K.zk_index.get_mpz_t(), p.get_mpz_t()) && K.zk_index > 1;
    if (index_divisor) {
        auto it = K.index_prime_data.find(p);
        check(it != K.index_prime_data.end(),
              "needs external prime data for index divisor p=" + p.get_str() + " in " + K.label);
        for (const auto& [gen_coords, ef] : it->second) {
            PrimeIdeal q;
            q.K = &K;
            q.p = p;
            q.e = ef.first;
            q.f = ef.second;
            q.gen = K.element(gen_coords);
            q.ideal_hnf = ideal_lattice_from_gens(K, {K.from_rational(Rat(p)), q.gen});
            out.push_back(std::move(q));
        }
    } else {
        check(p.fits_ulong_p(), "prime too large");
        PolyModP fp = poly_reduce_mod(K.poly, p.get_ui());
        check(fp.deg() == static_cast<int>(K.degree), "prime divides leading coefficient");
        for (const auto& [g, m] : polyp_factor_full(fp)) {
            PrimeIdeal q;
            q.K = &K;
            q.p = p;
            q.e = m;
            q.f = static_cast<unsigned>(g.deg());
            // gen = g(theta) with lifted coefficients
            FieldElement acc = K.zero();
            FieldElement th = K.theta();
            FieldElement powt = K.one();
            for (std::size_t i = 0; i < g.c.size(); ++i) {
                acc = acc + powt * Rat(Int(g.c[i]));
                powt = powt * th;
            }
            q.gen = acc;
            q.ideal_hnf = ideal_lattice_from_gens(K, {K.from_rational(Rat(p)), q.gen});
            out.push_back(std::move(q));
        }
    }
    std::sort(out.begin(), out.end());
    // sanity: sum of e*f = degree
    unsigned total = 0;
    for (const auto& q : out) total += q.e * q.f;
    check(total == K.degree, "prime factorization of p incomplete for p=" + p.get_str());
    return out;
}

// ---------- quotient rings, valuations ----------

QuotientRing quotient_ring(const NumberField& K, ZMat ideal_hnf) {
    check(ideal_hnf.size() == K.degree, "quotient_ring: lattice not full rank");
    return QuotientRing{&K, std::move(ideal_hnf)};
}

ZVec QuotientRing::reduce(const ZVec& v) const { return hnf_reduce(hnf_basis, v); }

ZVec QuotientRing::mul(const ZVec& a, const ZVec& b) const {
    const unsigned n = K->degree;
    ZVec out(n, Int(0));
    for (unsigned i = 0; i < n; ++i) {
        if (a[i] == 0) continue;
        for (unsigned j = 0; j < n; ++j) {
            if (b[j] == 0) continue;
            const QVec& row = K->mult_row(i, j);
            Int f = a[i] * b[j];
            for (unsigned t = 0; t < n; ++t)
                if (row[t] != 0) out[t] += f * row[t].get_num();
        }
    }
    return reduce(out);
}

ZVec QuotientRing::pow(ZVec a, Int e) const {
    ZVec r = one();
    a = reduce(a);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = mul(r, a);
        e >>= 1;
        if (e > 0) a = mul(a, a);
    }
    return r;
}

ZVec QuotientRing::one() const {
    QVec c = K->one().coords;
    ZVec v(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) v[i] = c[i].get_num();
    return reduce(v);
}

bool QuotientRing::is_zero(const ZVec& v) const {
    ZVec r = reduce(v);
    for (const auto& x : r)
        if (x != 0) return false;
    return true;
}

Int QuotientRing::size() const { return hnf_det(hnf_basis); }

std::vector<ZVec> QuotientRing::residues() const {
    const unsigned n = K->degree;
    std::vector<ZVec> out;
    ZVec idx(n, Int(0));
    while (true) {
        out.push_back(idx);
        unsigned i = 0;
        for (; i < n; ++i) {
            idx[i] += 1;
            if (idx[i] < hnf_basis[i][i]) break;
            idx[i] = 0;
        }
        if (i == n) break;
    }
    return out;
}

ZMat ideal_power_lattice(const PrimeIdeal& q, unsigned k) {
    const NumberField& K = *q.K;
    const unsigned n = K.degree;
    if (k == 0) {
        ZMat id(n, ZVec(n, Int(0)));
        for (unsigned i = 0; i < n; ++i) id[i][i] = 1;
        return id;
    }
    // binary powering over lattice products
    auto lat_mul = [&](const ZMat& a, const ZMat& b) {
        ZMat rows;
        for (const auto& ra : a)
            for (const auto& rb : b) {
                QVec ca(n), cb(n);
                for (unsigned i = 0; i < n; ++i) {
                    ca[i] = Rat(ra[i]);
                    cb[i] = Rat(rb[i]);
                }
                FieldElement prod = K.element(ca) * K.element(cb);
                ZVec row(n);
                for (unsigned i = 0; i < n; ++i) row[i] = prod.coords[i].get_num();
                rows.push_back(std::move(row));
            }
        return hnf(std::move(rows));
    };
    ZMat result;
    ZMat base = q.ideal_hnf;
    unsigned e = k;
    bool has = false;
    while (e > 0) {
        if (e & 1) {
            result = has ? lat_mul(result, base) : base;
            has = true;
        }
        e >>= 1;
        if (e > 0) base = lat_mul(base, base);
    }
    return result;
}

long ideal_valuation(const PrimeIdeal& q, const FieldElement& x) {
    check(!x.is_zero(), "ideal_valuation of zero");
    // clear denominator: x = y / m
    Int den = 1;
    for (const auto& c : x.coords) {
        Int d = c.get_den();
        den = den / gcd(den, d) * d;
    }
    FieldElement y = x * Rat(den);
    long vden =
        mpz_divisible_p(den.get_mpz_t(), q.p.get_mpz_t())
            ? static_cast<long>(q.e * btq::valuation(den, q.p))
            : 0;
    ZVec yz(y.coords.size());
    for (std::size_t i = 0; i < y.coords.size(); ++i) yz[i] = y.coords[i].get_num();
    long v = 0;
    ZMat power = q.ideal_hnf;
    if (!hnf_member(power, yz)) return -vden;
    while (true) {
        ++v;
        ZMat next = ideal_power_lattice(q, static_cast<unsigned>(v + 1));
        if (!hnf_member(next, yz)) return v - vden;
        check(v < 4096, "ideal_valuation runaway");
    }
}

// ---------- ideals ----------

bool Ideal::squarefree() const {
    for (const auto& [q, e] : factors)
        if (e > 1) return false;
    return true;
}

bool Ideal::coprime_to(const Ideal& other) const {
    for (const auto& [q, e] : factors)
        for (const auto& [q2, e2] : other.factors)
            if (q == q2) return false;
    return true;
}

std::string Ideal::str() const {
    if (factors.empty()) return "(1)";
    std::ostringstream os;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i) os << "*";
        os << factors[i].first.str();
        if (factors[i].second > 1) os << "^" << factors[i].second;
    }
    return os.str();
}

Ideal ideal_one(const NumberField&) { return Ideal{}; }

Ideal ideal_from_prime(const PrimeIdeal& q, unsigned e) {
    Ideal I;
    I.factors.emplace_back(q, e);
    I.norm = pow_int(q.norm(), e);
    return I;
}

Ideal ideal_mul(const Ideal& a, const Ideal& b) {
    Ideal out = a;
    for (const auto& [q, e] : b.factors) {
        bool found = false;
        for (auto& [q2, e2] : out.factors)
            if (q2 == q) {
                e2 += e;
                found = true;
                break;
            }
        if (!found) out.factors.emplace_back(q, e);
    }
    std::sort(out.factors.begin(), out.factors.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    out.norm = a.norm * b.norm;
    return out;
}

Ideal ideal_of_element(const NumberField& K, const FieldElement& x) {
    check(x.is_integral() && !x.is_zero(), "ideal_of_element: need nonzero integral element");
    Rat nr = x.norm();
    Int n = abs(nr.get_num());
    Ideal out;
    out.norm = 1;
    for (const auto& [p, e] : factor_int(n)) {
        (void)e;
        for (const auto& q : primes_above(K, p)) {
            long v = ideal_valuation(q, x);
            if (v > 0) {
                out.factors.emplace_back(q, static_cast<unsigned>(v));
                out.norm *= pow_int(q.norm(), static_cast<unsigned>(v));
            }
        }
    }
    std::sort(out.factors.begin(), out.factors.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    check(out.norm == n, "ideal_of_element: norm mismatch (incomplete factorization)");
    return out;
}

PrimeIdeal prime_of_site(const PrimeSite& site) {
    PrimeIdeal q;
    q.K = site.K;
    q.p = site.p;
    q.e = 1;
    q.f = 1;
    q.gen = site.gen;
    q.ideal_hnf = site.ideal_hnf;
    return q;
}

std::vector<Ideal> enumerate_ideals(const NumberField& K, const Int& X) {
    check(X >= 1, "enumerate_ideals: bound must be >= 1");
    std::vector<PrimeIdeal> primes;
    unsigned long xl = X.fits_ulong_p() ? X.get_ui() : 0;
    check(xl != 0 || X < 2, "enumerate_ideals: bound too large");
    for (unsigned long p : primes_up_to(xl)) {
        for (auto& q : primes_above(K, Int(p)))
            if (q.norm() <= X) primes.push_back(std::move(q));
    }
    std::sort(primes.begin(), primes.end(), [](const PrimeIdeal& a, const PrimeIdeal& b) {
        if (a.norm() != b.norm()) return a.norm() < b.norm();
        return a < b;
    });
    std::vector<Ideal> out{ideal_one(K)};
    // multiplicative DFS
    std::vector<std::pair<std::size_t, Ideal>> stack{{0, ideal_one(K)}};
    out.clear();
    while (!stack.empty()) {
        auto [start, cur] = stack.back();
        stack.pop_back();
        out.push_back(cur);
        for (std::size_t i = start; i < primes.size(); ++i) {
            Int nn = cur.norm * primes[i].norm();
            if (nn > X) continue;
            stack.emplace_back(i + 1, ideal_mul(cur, ideal_from_prime(primes[i], 1)));
            // higher powers
            Ideal powed = ideal_mul(cur, ideal_from_prime(primes[i], 1));
            while (true) {
                Int nn2 = powed.norm * primes[i].norm();
                if (nn2 > X) break;
                powed = ideal_mul(powed, ideal_from_prime(primes[i], 1));
                stack.emplace_back(i + 1, powed);
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Ideal& a, const Ideal& b) {
        if (a.norm != b.norm) return a.norm < b.norm;
        return a.str() < b.str();
    });
    return out;
}

// ---------- principalize ----------

namespace {

// Smallest unit along the convergents of sqrt(m): x^2 - m y^2 = +-1, or
// +-4 (the half-integer unit (x + y sqrt m)/2 when m = 1 mod 4). Returned
// as (x, y, halved). Any unit works for budget purposes; smaller is better.
struct PellUnit {
    Int x, y;
    bool halved;
};
PellUnit pell_unit(const Int& m) {
    Int a0 = isqrt_floor(m);
    check(a0 * a0 != m, "pell_unit: square input");
    bool allow_half = (mod_pos(m, Int(4)) == 1);
    Int P = 0, Q = 1, a = a0;
    Int h_prev = 1, h = a0, k_prev = 0, k = 1;
    for (int iter = 0; iter < 1000000; ++iter) {
        Int v = h * h - m * k * k;
        if (v == 1 || v == -1) return {h, k, false};
        if (allow_half && (v == 4 || v == -4)) return {h, k, true};
        P = a * Q - P;
        Q = (m - P * P) / Q;
        Int num = a0 + P;
        mpz_fdiv_q(a.get_mpz_t(), num.get_mpz_t(), Q.get_mpz_t());
        Int h2 = a * h + h_prev, k2 = a * k + k_prev;
        h_prev = h;
        h = h2;
        k_prev = k;
        k = k2;
    }
    throw error("pell_unit: period not found");
}

double ball_point_estimate(unsigned n, double bound, double covol) {
    double ball = std::pow(bound, n / 2.0);
    // crude unit-ball volume, underestimate is fine for a soft guard
    for (unsigned i = 0; i < n / 2; ++i) ball *= 3.1416 / (i + 1);
    return ball / covol;
}

}  // namespace

void principalize(PrimeSite& site, unsigned max_d) {
    const NumberField& K = *site.K;
    const unsigned n = K.degree;
    GramForm tf{K.trace_form()};
    PrimeIdeal q = prime_of_site(site);
    const double soft_cap = 2e7, hard_cap = 2e8;
    double gram_det = std::abs(mpq_get_d(qmat_det(K.trace_form()).get_mpq_t()));

    // For quadratic fields a Pell unit gives a decisive search bound: a
    // generator, if any, can be unit-balanced into Tr(x^2) <= N * (eps + 1).
    Int eps_up = 0;
    if (n == 2) {
        Int m = (mod_pos(K.disc, Int(4)) == 1) ? K.disc : K.disc / 4;
        PellUnit u = pell_unit(m);
        eps_up = u.x + u.y * (isqrt_floor(m) + 1) + 1;
        if (u.halved) eps_up = eps_up / 2 + 1;
    }

    auto try_bound = [&](unsigned d, const Int& target, const ZMat& lat,
                         const Rat& bound) -> bool {
        for (const auto& v : short_vectors(lat, tf, bound)) {
            QVec c(n);
            for (unsigned i = 0; i < n; ++i) c[i] = Rat(v[i]);
            FieldElement x = K.element(c);
            Rat nr = x.norm();
            if (abs(nr.get_num()) == target && nr.get_den() == 1) {
                site.d = d;
                site.delta = x;
                return true;
            }
        }
        return false;
    };

    for (unsigned d = 1; d <= max_d; ++d) {
        Int target = pow_int(site.p, d);  // |N(delta)| = p^d (inertia degree 1)
        ZMat lat = ideal_power_lattice(q, d);
        double covol =
            std::abs(mpz_get_d(hnf_det(lat).get_mpz_t())) * std::sqrt(gram_det);
        if (n == 2) {
            Rat bound = Rat(target) * Rat(eps_up + 1);
            check(ball_point_estimate(n, mpq_get_d(bound.get_mpq_t()), covol) <= hard_cap,
                  "principalize: decisive bound exceeds enumeration budget for p=" +
                      site.p.get_str() + " in " + K.label);
            if (try_bound(d, target, lat, bound)) return;
            continue;  // proven not principal at this exponent
        }
        // heuristic deepening for other degrees
        double base = n * std::pow(mpz_get_d(target.get_mpz_t()), 2.0 / n);
        for (unsigned round = 0; round < 40; ++round) {
            Rat bound(Int(static_cast<long>(std::ceil(base))) + 1);
            bound *= pow_int(Int(2), round + 1);
            if (ball_point_estimate(n, mpq_get_d(bound.get_mpq_t()), covol) > soft_cap) break;
            if (try_bound(d, target, lat, bound)) return;
        }
    }
    throw error("class order exceeds bound for site p=" + site.p.get_str() + " in " + K.label);
}

// ---------- automorphism action on ideals ----------

PrimeIdeal apply_automorphism(const NumberField& K, std::size_t idx, const PrimeIdeal& q) {
    PrimeIdeal out = q;
    out.gen = K.apply_automorphism(idx, q.gen);
    out.ideal_hnf =
        ideal_lattice_from_gens(K, {K.from_rational(Rat(q.p)), out.gen});
    return out;
}

Ideal apply_automorphism(const NumberField& K, std::size_t idx, const Ideal& I) {
    Ideal out;
    out.norm = I.norm;
    for (const auto& [q, e] : I.factors) out.factors.emplace_back(apply_automorphism(K, idx, q), e);
    std::sort(out.factors.begin(), out.factors.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

// ---------- zeta ----------

Zeta2Bounds zeta2_bounds(const NumberField& K, unsigned long prime_bound) {
    Zeta2Bounds z;
    if (prime_bound < 2) return z;
    double lower = 1.0;
    for (unsigned long p : primes_up_to(prime_bound)) {
        std::vector<unsigned> fs;
        bool index_divisor =
            K.zk_index > 1 && mpz_divisible_p(K.zk_index.get_mpz_t(), Int(p).get_mpz_t());
        if (index_divisor) {
            auto it = K.index_prime_data.find(Int(p));
            check(it != K.index_prime_data.end(),
                  "needs external prime data for index divisor p=" + std::to_string(p));
            for (const auto& [g, ef] : it->second) fs.push_back(ef.second);
        } else {
            PolyModP fp = poly_reduce_mod(K.poly, p);
            if (fp.deg() != static_cast<int>(K.degree)) continue;
            if (polyp_is_squarefree(fp)) {
                // degrees suffice; no need to split the blocks
                for (auto& [deg, block] : polyp_distinct_degree(fp)) {
                    unsigned count = static_cast<unsigned>(block.deg()) / deg;
                    for (unsigned i = 0; i < count; ++i) fs.push_back(deg);
                }
            } else {
                for (auto& [g, m] : polyp_factor_full(fp))
                    fs.push_back(static_cast<unsigned>(g.deg()));
            }
        }
        for (unsigned f : fs) {
            double nq = std::pow(static_cast<double>(p), static_cast<double>(f));
            if (nq > static_cast<double>(prime_bound)) continue;
            double factor = 1.0 / (1.0 - 1.0 / (nq * nq));
            lower = std::nextafter(lower * std::nextafter(factor, 0.0), 0.0);
        }
    }
    z.lower = lower;
    double tail = std::exp(2.0 * K.degree / static_cast<double>(prime_bound));
    z.upper = std::nextafter(lower * std::nextafter(tail, 2.0 * tail), 2.0 * lower * tail);
    return z;
}

double zeta2_lower(const NumberField& K, unsigned long prime_bound) {
    return zeta2_bounds(K, prime_bound).lower;
}

}  // namespace btq
