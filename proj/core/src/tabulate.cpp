#include "btq/tabulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace btq {

using nlohmann::json;

Rat phi_of(const Ideal& I) {
    Rat out(I.norm);
    for (const auto& [q, e] : I.factors) {
        (void)e;
        out *= Rat(q.norm() - 1) / Rat(q.norm());
    }
    return out;
}

Rat psi_of(const Ideal& I) {
    Rat out(I.norm);
    for (const auto& [q, e] : I.factors) {
        (void)e;
        out *= Rat(q.norm() + 1) / Rat(q.norm());
    }
    return out;
}

namespace {

double down(double x) { return std::nextafter(x, 0.0); }
double up(double x) { return std::nextafter(x, 1e308); }

// (2pi)^{2n} as an interval
std::pair<double, double> two_pi_pow(unsigned n2) {
    double lo = 1, hi = 1;
    const double pi_lo = 3.14159265358979311;  // just below pi
    const double pi_hi = 3.14159265358979356;  // just above pi
    for (unsigned i = 0; i < n2; ++i) {
        lo = down(lo * 2 * pi_lo);
        hi = up(hi * 2 * pi_hi);
    }
    return {lo, hi};
}

std::pair<double, double> d32_interval(const Int& d) {
    double dd = mpz_get_d(d.get_mpz_t());
    double lo = down(down(dd) * down(std::sqrt(down(dd))));
    double hi = up(up(dd) * up(std::sqrt(up(dd))));
    return {lo, hi};
}

}  // namespace

std::pair<double, double> shimizu_area(const NumberField& K, const Rat& phi_pnm,
                                       const Rat& psi_np, const Zeta2Bounds& z) {
    auto [tp_lo, tp_hi] = two_pi_pow(2 * K.degree);
    auto [d_lo, d_hi] = d32_interval(K.disc);
    double pp_lo = down(mpq_get_d(phi_pnm.get_mpq_t()));
    double pp_hi = up(mpq_get_d(phi_pnm.get_mpq_t()));
    double ps_lo = down(mpq_get_d(psi_np.get_mpq_t()));
    double ps_hi = up(mpq_get_d(psi_np.get_mpq_t()));
    double lo = down(4 * d_lo * z.lower * pp_lo * ps_lo / tp_hi);
    double hi = up(4 * d_hi * z.upper * pp_hi * ps_hi / tp_lo);
    return {lo, hi};
}

double cf_lower(const NumberField& K, double zeta_lower) {
    auto [tp_lo, tp_hi] = two_pi_pow(2 * K.degree);
    auto [d_lo, d_hi] = d32_interval(K.disc);
    (void)tp_lo;
    (void)d_hi;
    return down(0.1875 * d_lo * zeta_lower / tp_hi);
}

std::vector<const NumberField*> field_candidates(const std::vector<const NumberField*>& all,
                                                 unsigned g_max) {
    std::vector<const NumberField*> out;
    for (const NumberField* K : all) {
        auto [tp_lo, tp_hi] = two_pi_pow(2 * K->degree);
        auto [d_lo, d_hi] = d32_interval(K->disc);
        (void)d_hi;
        (void)tp_lo;
        double lhs = down(4 * d_lo / tp_hi);  // keep on ties: compare the lower bound
        if (lhs < (64.0 / 3.0) * (g_max + 1)) out.push_back(K);
    }
    std::sort(out.begin(), out.end(), [](const NumberField* a, const NumberField* b) {
        if (a->degree != b->degree) return a->degree < b->degree;
        if (a->disc != b->disc) return a->disc < b->disc;
        return a->label < b->label;
    });
    return out;
}

std::string CandidateDatum::key() const {
    std::ostringstream os;
    os << K->label << "|p" << site.p.get_str() << "r" << mod_pos(site.r, site.p).get_str()
       << "|Nm" << n_minus.str() << "|Np" << n_plus.str();
    return os.str();
}

std::vector<CandidateDatum> candidate_data(const NumberField& K, unsigned g_max,
                                           unsigned long zeta_bound) {
    std::vector<CandidateDatum> out;
    Zeta2Bounds z = zeta2_bounds(K, zeta_bound);
    double cf = cf_lower(K, z.lower);
    double gp1 = g_max + 1;
    if (cf <= 0) throw error("candidate_data: C_F underflow");

    // smallest degree-1 unramified prime norm
    Int q0_norm = 0;
    for (unsigned long p = 2; p < 100000; ++p) {
        // cheap primality via trial division
        bool prime = p >= 2;
        for (unsigned long t = 2; t * t <= p && prime; ++t)
            if (p % t == 0) prime = false;
        if (!prime) continue;
        if (!split_prime(K, Int(p)).empty()) {
            q0_norm = Int(p);
            break;
        }
    }
    check(q0_norm != 0, "no degree-1 unramified prime found");
    double q0m1 = mpz_get_d(q0_norm.get_mpz_t()) - 1;
    if (cf * q0m1 >= gp1) return out;

    double psi_bound = gp1 / (cf * q0m1);
    Int psi_floor(static_cast<long>(std::floor(psi_bound)));
    if (psi_floor < 1) return out;
    std::vector<Ideal> nplus_list;
    for (auto& I : enumerate_ideals(K, psi_floor)) {
        Rat psi = psi_of(I);
        if (mpq_get_d(psi.get_mpq_t()) < psi_bound) nplus_list.push_back(std::move(I));
    }

    for (const auto& nplus : nplus_list) {
        double psi = up(mpq_get_d(psi_of(nplus).get_mpq_t()));
        double p_bound = gp1 / (cf * psi);  // N(p) - 1 <= this
        // all degree-1 unramified sites with norm <= p_bound + 1
        for (unsigned long p = 2; p <= static_cast<unsigned long>(p_bound) + 1; ++p) {
            bool prime = p >= 2;
            for (unsigned long t = 2; t * t <= p && prime; ++t)
                if (p % t == 0) prime = false;
            if (!prime) continue;
            if (mpz_get_d(Int(p).get_mpz_t()) - 1 > p_bound) continue;
            for (const auto& site : split_prime(K, Int(p))) {
                // p must not divide N+
                bool divides = false;
                for (const auto& [q, e] : nplus.factors) {
                    (void)e;
                    if (q.ideal_hnf == site.ideal_hnf) divides = true;
                }
                if (divides) continue;
                double phi_p = static_cast<double>(p) - 1;
                double nm_bound = gp1 / (cf * std::max(phi_p, 1.0) * psi);
                // primes for N-: norm - 1 <= nm_bound, distinct, not dividing pN+
                std::vector<PrimeIdeal> pool;
                for (unsigned long pp = 2;
                     pp <= static_cast<unsigned long>(nm_bound) + 1; ++pp) {
                    bool isp = pp >= 2;
                    for (unsigned long t = 2; t * t <= pp && isp; ++t)
                        if (pp % t == 0) isp = false;
                    if (!isp) continue;
                    for (auto& q : primes_above(K, Int(pp))) {
                        if (mpz_get_d(q.norm().get_mpz_t()) - 1 > nm_bound) continue;
                        if (q.ideal_hnf == site.ideal_hnf) continue;
                        bool in_np = false;
                        for (const auto& [qq, e] : nplus.factors) {
                            (void)e;
                            if (qq == q) in_np = true;
                        }
                        if (!in_np) pool.push_back(std::move(q));
                    }
                }
                std::sort(pool.begin(), pool.end());
                // squarefree products with factor-count parity = degree parity
                // and Phi(N-) <= nm_bound
                struct Frame {
                    std::size_t next;
                    Ideal cur;
                    double phi;
                };
                std::vector<Frame> stack{{0, Ideal{}, 1.0}};
                while (!stack.empty()) {
                    Frame f = stack.back();
                    stack.pop_back();
                    if (f.cur.factors.size() % 2 == K.degree % 2 && f.phi <= nm_bound) {
                        CandidateDatum cd;
                        cd.K = &K;
                        cd.site = site;
                        cd.n_minus = f.cur;
                        cd.n_plus = nplus;
                        out.push_back(std::move(cd));
                    }
                    for (std::size_t i = f.next; i < pool.size(); ++i) {
                        double phi_q = mpz_get_d(pool[i].norm().get_mpz_t()) - 1;
                        double next_phi = up(f.phi * phi_q);
                        if (next_phi > nm_bound) continue;
                        stack.push_back(
                            {i + 1, ideal_mul(f.cur, ideal_from_prime(pool[i])), next_phi});
                    }
                }
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const CandidateDatum& a, const CandidateDatum& b) { return a.key() < b.key(); });
    return out;
}

std::vector<CandidateDatum> dedup(const NumberField& K, std::vector<CandidateDatum> data) {
    if (K.automorphism_count() <= 1) return data;
    // map a site to its canonical (p, r) under an automorphism
    auto map_site = [&](std::size_t aut, const PrimeSite& s) -> PrimeSite {
        PrimeIdeal q = prime_of_site(s);
        PrimeIdeal img = apply_automorphism(K, aut, q);
        for (const auto& cand : split_prime(K, s.p))
            if (cand.ideal_hnf == img.ideal_hnf) return cand;
        throw error("dedup: automorphism image of a site not found");
    };
    std::vector<CandidateDatum> out;
    for (const auto& cd : data) {
        std::string k = cd.key();
        bool canonical = true;
        for (std::size_t a = 0; a < K.automorphism_count(); ++a) {
            CandidateDatum img;
            img.K = cd.K;
            img.site = map_site(a, cd.site);
            img.n_minus = apply_automorphism(K, a, cd.n_minus);
            img.n_plus = apply_automorphism(K, a, cd.n_plus);
            if (img.key() < k) {
                canonical = false;
                break;
            }
        }
        if (canonical) out.push_back(cd);
    }
    return out;
}

std::string CurveDatum::to_jsonl() const {
    json j{{"key", key},
           {"field", field_label},
           {"degree", degree},
           {"prime", prime_str},
           {"Nminus", nminus_str},
           {"Nplus", nplus_str},
           {"status", status},
           {"genus", genus},
           {"vertices", n_vertices},
           {"edges", n_edges},
           {"area_lo", area_lo},
           {"area_hi", area_hi},
           {"time_ms", time_ms},
           {"area_checks_ok", area_checks_ok}};
    if (!error.empty()) j["error"] = error;
    return j.dump();
}

CurveDatum CurveDatum::from_jsonl(const std::string& line) {
    json j = json::parse(line);
    CurveDatum d;
    d.key = j.at("key").get<std::string>();
    d.field_label = j.at("field").get<std::string>();
    d.degree = j.at("degree").get<unsigned>();
    d.prime_str = j.at("prime").get<std::string>();
    d.nminus_str = j.at("Nminus").get<std::string>();
    d.nplus_str = j.at("Nplus").get<std::string>();
    d.status = j.at("status").get<std::string>();
    d.genus = j.at("genus").get<unsigned>();
    d.n_vertices = j.at("vertices").get<std::size_t>();
    d.n_edges = j.at("edges").get<std::size_t>();
    d.area_lo = j.at("area_lo").get<double>();
    d.area_hi = j.at("area_hi").get<double>();
    d.time_ms = j.at("time_ms").get<double>();
    d.area_checks_ok = j.at("area_checks_ok").get<bool>();
    if (j.contains("error")) d.error = j.at("error").get<std::string>();
    return d;
}

namespace {

CurveDatum compute_datum(const CandidateDatum& cd, unsigned g_max, unsigned long zeta_bound) {
    const NumberField& K = *cd.K;
    CurveDatum row;
    row.key = cd.key();
    row.field_label = K.label;
    row.degree = K.degree;
    row.prime_str = "p" + cd.site.p.get_str() + "r" + mod_pos(cd.site.r, cd.site.p).get_str();
    row.nminus_str = cd.n_minus.str();
    row.nplus_str = cd.n_plus.str();
    auto t0 = std::chrono::steady_clock::now();
    try {
        auto ps = setup_problem(K, cd.n_minus, cd.n_plus, cd.site);
        auto res = fundamental_domain(ps->ctx, g_max);
        row.genus = res.graph.genus;
        row.n_vertices = res.graph.vertices.size();
        row.n_edges = res.graph.edges.size();
        row.status = res.limit_exceeded ? "limit_exceeded" : "done";
        if (!res.limit_exceeded) {
            Zeta2Bounds z = zeta2_bounds(K, zeta_bound);
            PrimeIdeal q = prime_of_site(ps->site);
            Rat phi = phi_of(ideal_mul(ideal_from_prime(q), cd.n_minus));
            Rat psi = psi_of(cd.n_plus);
            auto [lo, hi] = shimizu_area(K, phi, psi, z);
            row.area_lo = lo;
            row.area_hi = hi;
            bool selberg = lo < (64.0 / 3.0) * (row.genus + 1);
            bool floor_ok = hi >= 2.0 * row.genus - 2.0 - 0.01;
            row.area_checks_ok = selberg && floor_ok;
        }
    } catch (const std::exception& e) {
        row.status = "error";
        row.error = e.what();
    }
    row.time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    return row;
}

}  // namespace

std::vector<CurveDatum> run_tabulation(const TabConfig& cfg) {
    // resume data
    std::map<std::string, CurveDatum> existing;
    if (cfg.resume && !cfg.out_path.empty()) {
        std::ifstream in(cfg.out_path);
        std::string line;
        while (in.good() && std::getline(in, line)) {
            if (line.empty()) continue;
            CurveDatum d = CurveDatum::from_jsonl(line);
            existing.emplace(d.key, std::move(d));
        }
    }

    // canonical candidate list
    std::vector<CandidateDatum> all;
    for (const NumberField* K : field_candidates(cfg.fields, cfg.g_max)) {
        auto cands = dedup(*K, candidate_data(*K, cfg.g_max, cfg.zeta_bound));
        for (auto& c : cands) all.push_back(std::move(c));
    }

    std::vector<CurveDatum> rows(all.size());
    std::atomic<std::size_t> next{0};
    std::mutex io;
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= all.size()) break;
            std::string key = all[i].key();
            auto it = existing.find(key);
            if (it != existing.end()) {
                rows[i] = it->second;
                continue;
            }
            rows[i] = compute_datum(all[i], cfg.g_max, cfg.zeta_bound);
        }
        (void)io;
    };
    unsigned jobs = std::max(1u, cfg.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    if (!cfg.out_path.empty()) {
        std::ostringstream os;
        for (const auto& r : rows) os << r.to_jsonl() << "\n";
        write_text_file(cfg.out_path, os.str());
    }
    if (!cfg.summary_path.empty()) write_text_file(cfg.summary_path, summary_json(rows, cfg.g_max));
    return rows;
}

std::string summary_json(const std::vector<CurveDatum>& rows, unsigned g_max) {
    // count matrix: degree x genus for completed rows
    std::map<unsigned, std::vector<std::size_t>> counts;
    std::size_t errors = 0, limit = 0;
    for (const auto& r : rows) {
        if (r.status == "error") {
            ++errors;
            continue;
        }
        if (r.status == "limit_exceeded") {
            ++limit;
            continue;
        }
        auto& vec = counts[r.degree];
        if (vec.empty()) vec.assign(g_max + 1, 0);
        if (r.genus <= g_max) ++vec[r.genus];
    }
    json j;
    j["g_max"] = g_max;
    j["counts"] = json::object();
    for (const auto& [deg, vec] : counts) j["counts"][std::to_string(deg)] = vec;
    j["rows"] = rows.size();
    j["errors"] = errors;
    j["limit_exceeded"] = limit;
    return j.dump(1);
}

}  // namespace btq
