// btq: fundamental domains for quaternionic S-arithmetic groups on the
// Bruhat-Tits tree, and the Shimura-curve tabulation built on them.
//
// Subcommands: fundom | reduce | tabulate | bench | check
// Exit codes: 0 ok, 2 validation error, 3 genus limit exceeded.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "btq/tabulate.hpp"

using namespace btq;

namespace {

std::string field_table_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("BTQ_FIELD_TABLES")) return env;
    return "data/fields";
}

struct LoadedProblem {
    FieldRegistry registry;
    ProblemConfig cfg;
    std::unique_ptr<ProblemSetup> ps;
};

LoadedProblem load_problem(const std::string& config_path, const std::string& tables) {
    LoadedProblem lp;
    lp.registry.load_directory(field_table_dir(tables));
    lp.cfg = load_problem_config(config_path, lp.registry);
    lp.ps = setup_problem(*lp.cfg.K, lp.cfg.n_minus, lp.cfg.n_plus, lp.cfg.site,
                          lp.cfg.options);
    return lp;
}

VertexRep random_walk_vertex(Rng& rng, const Int& p, unsigned dist) {
    VertexRep prev = origin_vertex(), cur = origin_vertex();
    for (unsigned i = 0; i < dist; ++i) {
        auto nb = neighbors(cur, p);
        VertexRep next;
        do {
            next = nb[rng.next(nb.size())];
        } while (i > 0 && next == prev);
        prev = cur;
        cur = next;
    }
    return cur;
}

int cmd_fundom(const std::string& config_path, const std::string& tables,
               const std::string& out, const std::string& dot, std::optional<unsigned> max_genus,
               bool verify) {
    LoadedProblem lp = load_problem(config_path, tables);
    std::optional<unsigned> limit = max_genus ? max_genus : lp.cfg.max_genus;
    auto res = fundamental_domain(lp.ps->ctx, limit);
    if (res.limit_exceeded) {
        std::cerr << "genus limit exceeded (genus > " << *limit << ")\n";
        return 3;
    }
    boundary_data(lp.ps->ctx, res.graph);
    if (verify) {
        // re-verify every pairing element action
        const auto& g = res.graph;
        for (const auto& [outer, pr] : g.edge_pairings) {
            EdgeRep expect = g.edges[pr.index];
            if (pr.reversed) expect = reverse(expect, g.p);
            check(act(lp.ps->ctx, pr.g, outer) == expect, "verification failed: edge pairing");
        }
        for (const auto& [outer, pr] : g.vertex_pairings)
            check(act(lp.ps->ctx, pr.g, outer) == g.vertices[pr.index],
                  "verification failed: vertex pairing");
        std::cerr << "verified " << g.edge_pairings.size() << " edge and "
                  << g.vertex_pairings.size() << " vertex pairings\n";
    }
    std::string payload = graph_to_json(lp.ps->ctx, res.graph, lp.cfg);
    if (out.empty())
        std::cout << payload << "\n";
    else
        write_text_file(out, payload);
    if (!dot.empty()) write_text_file(dot, graph_to_dot(lp.ps->ctx, res.graph));
    std::cerr << "genus " << res.graph.genus << ", " << res.graph.vertices.size()
              << " vertices, " << res.graph.edges.size() << " edges, "
              << res.graph.equiv_calls << " equivalence queries, " << res.graph.time_ms
              << " ms\n";
    return 0;
}

int cmd_reduce(const std::string& config_path, const std::string& tables,
               const std::string& graph_path, const std::string& edge_text, bool verify) {
    LoadedProblem lp = load_problem(config_path, tables);
    QuotientGraph g = graph_from_json(lp.ps->ctx, read_text_file(graph_path));
    TreeMat m = parse_tree_matrix(edge_text);
    EdgeRep e = normalize_edge(m, lp.ps->ctx.site.p);
    std::uint64_t lookups = 0;
    auto [red, gamma] = reduce_edge(lp.ps->ctx, g, e, &lookups);
    std::cout << "edge " << tree_matrix_str(red.matrix(lp.ps->ctx.site.p)) << "\n";
    std::cout << "gamma {";
    for (std::size_t i = 0; i < gamma.lam.size(); ++i)
        std::cout << (i ? "," : "") << gamma.lam[i].get_str();
    std::cout << "} / delta^" << gamma.t << "\n";
    std::cout << "lookups " << lookups << "\n";
    if (verify) {
        check(act(lp.ps->ctx, gamma, e) == red, "verification failed: action mismatch");
        auto w = is_equivalent(lp.ps->ctx, e, red);
        check(w.has_value(), "verification failed: reduced edge not equivalent");
        std::cerr << "verified\n";
    }
    return 0;
}

int cmd_bench(const std::string& config_path, const std::string& tables, unsigned samples,
              unsigned max_dist, const std::string& out_csv) {
    LoadedProblem lp = load_problem(config_path, tables);
    auto& ctx = lp.ps->ctx;
    Rng rng(lp.cfg.seed ? lp.cfg.seed : 0xb7f5u);
    std::ostringstream csv;
    csv << "distance,min_ms,q1_ms,median_ms,q3_ms,max_ms\n";
    for (unsigned dist = 10; dist <= max_dist; dist += 10) {
        std::vector<double> times;
        for (unsigned s = 0; s < samples; ++s) {
            VertexRep v = random_walk_vertex(rng, ctx.site.p, dist);
            auto t0 = std::chrono::steady_clock::now();
            auto w = is_equivalent(ctx, origin_vertex(), v);
            (void)w;
            times.push_back(std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - t0)
                                .count());
        }
        if (times.empty()) continue;
        std::sort(times.begin(), times.end());
        auto q = [&](double frac) {
            std::size_t idx = static_cast<std::size_t>(frac * (times.size() - 1));
            return times[idx];
        };
        csv << dist << "," << times.front() << "," << q(0.25) << "," << q(0.5) << ","
            << q(0.75) << "," << times.back() << "\n";
        std::cerr << "distance " << dist << ": median " << q(0.5) << " ms over "
                  << times.size() << " samples\n";
    }
    if (out_csv.empty())
        std::cout << csv.str();
    else
        write_text_file(out_csv, csv.str());
    return 0;
}

int cmd_tabulate(const std::string& tables, unsigned g_max, unsigned degree_min,
                 unsigned degree_max, unsigned long zeta_bound, const std::string& out,
                 const std::string& summary, bool resume, unsigned jobs) {
    FieldRegistry registry;
    registry.load_directory(field_table_dir(tables));
    TabConfig cfg;
    // tables may present the same field under several labels; keep one
    // presentation per (degree, discriminant)
    std::vector<const NumberField*> picked;
    for (const NumberField* K : registry.all()) {
        if (K->degree < degree_min || K->degree > degree_max) continue;
        bool dup = false;
        for (const NumberField* other : picked)
            if (other->degree == K->degree && other->disc == K->disc) dup = true;
        if (!dup) picked.push_back(K);
    }
    std::sort(picked.begin(), picked.end(), [](const NumberField* a, const NumberField* b) {
        if (a->degree != b->degree) return a->degree < b->degree;
        if (a->disc != b->disc) return a->disc < b->disc;
        return a->label < b->label;
    });
    cfg.fields = picked;
    cfg.g_max = g_max;
    cfg.zeta_bound = zeta_bound;
    cfg.out_path = out;
    cfg.summary_path = summary;
    cfg.resume = resume;
    cfg.jobs = jobs;
    auto rows = run_tabulation(cfg);
    std::size_t done = 0, limited = 0, errors = 0;
    bool checks = true;
    for (const auto& r : rows) {
        if (r.status == "done") ++done;
        if (r.status == "limit_exceeded") ++limited;
        if (r.status == "error") ++errors;
        if (!r.area_checks_ok) checks = false;
    }
    std::cerr << rows.size() << " candidates: " << done << " done, " << limited
              << " over the genus bound, " << errors << " errors\n";
    if (!checks) {
        std::cerr << "area consistency check failed on some rows\n";
        return 1;
    }
    std::cout << summary_json(rows, g_max) << "\n";
    return 0;
}

int cmd_check(const std::string& config_path, const std::string& tables) {
    LoadedProblem lp = load_problem(config_path, tables);
    const auto& ps = *lp.ps;
    std::cout << "field: " << lp.cfg.field_label << " (degree " << ps.K->degree << ", disc "
              << ps.K->disc.get_str() << ")\n";
    std::cout << "algebra: a=" << ps.B.a.str() << " b=" << ps.B.b.str()
              << " definite=" << (ps.B.definite ? "yes" : "no") << "\n";
    std::cout << "ram(B):";
    for (const auto& q : ps.B.ram_finite) std::cout << " " << q.str();
    std::cout << "\n";
    std::cout << "reduced discriminant of R: " << reduced_discriminant(ps.order).str() << "\n";
    std::cout << "site: p=" << ps.site.p.get_str() << " r=" << mod_pos(ps.site.r, ps.site.p).get_str()
              << " d=" << ps.site.d << " delta=" << ps.site.delta.str() << "\n";
    std::cout << "splitting precision cap: " << ps.ctx.iota.n_cap << "\n";
    std::cout << "ok\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bruhat-Tits tree quotients for quaternionic S-arithmetic groups"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string tables;
    app.add_option("--field-tables", tables, "directory with field table JSON files");

    std::string config, out, dot, graph_path, edge_text, csv, summary;
    unsigned samples = 100, max_dist = 60, g_max = 3, jobs = 1;
    unsigned degree_min = 2, degree_max = 2;
    unsigned long zeta_bound = 100000;
    std::optional<unsigned> max_genus;
    bool verify = false, resume = false;

    auto* fundom = app.add_subcommand("fundom", "compute a fundamental domain");
    fundom->add_option("--config", config)->required();
    fundom->add_option("--out", out, "output JSON path (stdout when empty)");
    fundom->add_option("--dot", dot, "also write a DOT file");
    unsigned mg_flag = 0;
    auto* mg_opt = fundom->add_option("--max-genus", mg_flag, "early exit bound");
    fundom->add_flag("--verify", verify, "re-verify every pairing");

    auto* reduce = app.add_subcommand("reduce", "reduce an edge into a stored domain");
    reduce->add_option("--config", config)->required();
    reduce->add_option("--graph", graph_path)->required();
    reduce->add_option("--edge", edge_text, "matrix like [[a,b],[c,d]]")->required();
    reduce->add_flag("--verify", verify);

    auto* bench = app.add_subcommand("bench", "equivalence-query timing by distance");
    bench->add_option("--config", config)->required();
    bench->add_option("--samples", samples);
    bench->add_option("--max-dist", max_dist);
    bench->add_option("--out", csv, "CSV path (stdout when empty)");

    auto* tab = app.add_subcommand("tabulate", "tabulate uniformizable curves");
    tab->add_option("--g-max", g_max);
    tab->add_option("--degree-min", degree_min);
    tab->add_option("--degree-max", degree_max);
    tab->add_option("--zeta-bound", zeta_bound);
    tab->add_option("--out", out)->required();
    tab->add_option("--summary", summary);
    tab->add_flag("--resume", resume);
    tab->add_option("--jobs", jobs);

    auto* chk = app.add_subcommand("check", "validate a configuration end to end");
    chk->add_option("--config", config)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (fundom->parsed()) {
            if (mg_opt->count()) max_genus = mg_flag;
            return cmd_fundom(config, tables, out, dot, max_genus, verify);
        }
        if (reduce->parsed()) return cmd_reduce(config, tables, graph_path, edge_text, verify);
        if (bench->parsed()) return cmd_bench(config, tables, samples, max_dist, csv);
        if (tab->parsed())
            return cmd_tabulate(tables, g_max, degree_min, degree_max, zeta_bound, out,
                                summary, resume, jobs);
        if (chk->parsed()) return cmd_check(config, tables);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
