#ifndef BTQ_TABULATE_HPP
#define BTQ_TABULATE_HPP

#include "btq/json_io.hpp"

namespace btq {

// Exact multiplicative functions on ideals.
Rat phi_of(const Ideal& I);  // N(I) * prod (1 - 1/N(q))
Rat psi_of(const Ideal& I);  // N(I) * prod (1 + 1/N(q))

// Shimizu area interval: 4 (2pi)^{-2n} d^{3/2} zeta_F(2) Phi(p N-) Psi(N+),
// with the zeta factor supplied as a two-sided bound.
std::pair<double, double> shimizu_area(const NumberField& K, const Rat& phi_pnm,
                                       const Rat& psi_np, const Zeta2Bounds& z);

// C_F = (3/16) d^{3/2} zeta_F(2) (2pi)^{-2n}, rounded down (completeness of
// the enumeration only needs a lower bound).
double cf_lower(const NumberField& K, double zeta_lower);

// Fields whose discriminant passes 4 (2pi)^{-2n} d^{3/2} < (64/3)(g+1).
std::vector<const NumberField*> field_candidates(const std::vector<const NumberField*>& all,
                                                 unsigned g_max);

struct CandidateDatum {
    const NumberField* K = nullptr;
    PrimeSite site;
    Ideal n_minus;
    Ideal n_plus;
    std::string key() const;  // canonical serialized form
};

// The nested enumeration of uniformization data at genus bound g_max.
std::vector<CandidateDatum> candidate_data(const NumberField& K, unsigned g_max,
                                           unsigned long zeta_bound);

// One representative per automorphism orbit (lexicographically least key).
std::vector<CandidateDatum> dedup(const NumberField& K, std::vector<CandidateDatum> data);

struct CurveDatum {
    std::string key;
    std::string field_label;
    std::string prime_str, nminus_str, nplus_str;
    unsigned degree = 0;
    unsigned genus = 0;
    std::size_t n_vertices = 0, n_edges = 0;
    double area_lo = 0, area_hi = 0;
    double time_ms = 0;
    std::string status;  // done | limit_exceeded | error
    std::string error;
    bool area_checks_ok = true;

    std::string to_jsonl() const;
    static CurveDatum from_jsonl(const std::string& line);
};

struct TabConfig {
    std::vector<const NumberField*> fields;
    unsigned g_max = 3;
    unsigned long zeta_bound = 100000;
    std::string out_path;
    std::string summary_path;
    bool resume = false;
    unsigned jobs = 1;
};

// Runs the whole pipeline; per-candidate failures become error rows. The
// output file is written in canonical candidate order regardless of the
// completion order, so reruns are byte-identical.
std::vector<CurveDatum> run_tabulation(const TabConfig& cfg);

std::string summary_json(const std::vector<CurveDatum>& rows, unsigned g_max);

}  // namespace btq

#endif
