#include "btq/json_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace btq {

using nlohmann::json;

namespace {

QVec parse_rat_vec(const json& arr) {
    QVec out;
    for (const auto& x : arr) {
        if (x.is_string())
            out.push_back(rat_from_string(x.get<std::string>()));
        else
            out.push_back(Rat(static_cast<long>(x.get<long long>())));
    }
    return out;
}

std::unique_ptr<NumberField> field_from_json(const json& j) {
    std::string label = j.at("label").get<std::string>();
    ZPoly poly;
    for (const auto& c : j.at("poly")) {
        if (c.is_string())
            poly.emplace_back(c.get<std::string>());
        else
            poly.push_back(Int(static_cast<long>(c.get<long long>())));
    }
    QMat omega;
    for (const auto& row : j.at("integral_basis")) omega.push_back(parse_rat_vec(row));
    Int disc;
    if (j.at("disc").is_string())
        disc = Int(j.at("disc").get<std::string>());
    else
        disc = Int(static_cast<long>(j.at("disc").get<long long>()));
    std::vector<QVec> auts;
    for (const auto& row : j.at("automorphisms")) auts.push_back(parse_rat_vec(row));
    std::map<Int, std::vector<std::pair<QVec, std::pair<unsigned, unsigned>>>> idx;
    if (j.contains("index_primes")) {
        for (const auto& entry : j.at("index_primes")) {
            Int p(static_cast<long>(entry.at("p").get<long long>()));
            for (const auto& f : entry.at("factors"))
                idx[p].emplace_back(parse_rat_vec(f.at("gen")),
                                    std::make_pair(f.at("e").get<unsigned>(),
                                                   f.at("f").get<unsigned>()));
        }
    }
    return NumberField::create(label, poly, omega, disc, auts, idx);
}

json group_to_json(const GroupElement& g) {
    json coords = json::array();
    for (const auto& c : g.lam) coords.push_back(c.get_str());
    return json{{"coords", coords}, {"t", g.t}};
}

GroupElement group_from_json(const json& j) {
    GroupElement g;
    for (const auto& c : j.at("coords")) g.lam.emplace_back(c.get<std::string>());
    g.t = j.at("t").get<unsigned>();
    return g;
}

}  // namespace

void FieldRegistry::load_file(const std::string& path) {
    std::ifstream in(path);
    check(in.good(), "cannot open field table: " + path);
    json j;
    in >> j;
    check(j.is_array(), "field table must be a JSON array: " + path);
    for (const auto& entry : j) {
        auto f = field_from_json(entry);
        check(find(f->label) == nullptr, "duplicate field label: " + f->label);
        fields_.push_back(std::move(f));
    }
}

void FieldRegistry::load_directory(const std::string& dir) {
    std::vector<std::string> paths;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".json") paths.push_back(e.path().string());
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) load_file(p);
}

const NumberField* FieldRegistry::add_inline(const std::string& text) {
    auto f = field_from_json(json::parse(text));
    const NumberField* existing = find(f->label);
    check(existing == nullptr, "duplicate field label: " + f->label);
    fields_.push_back(std::move(f));
    return fields_.back().get();
}

const NumberField* FieldRegistry::find(const std::string& label) const {
    for (const auto& f : fields_)
        if (f->label == label) return f.get();
    return nullptr;
}

const NumberField* FieldRegistry::require(const std::string& label) const {
    const NumberField* f = find(label);
    check(f != nullptr, "unknown field label: " + label);
    return f;
}

std::vector<const NumberField*> FieldRegistry::all() const {
    std::vector<const NumberField*> out;
    for (const auto& f : fields_) out.push_back(f.get());
    return out;
}

Ideal parse_principal_ideal(const NumberField& K, const std::string& text) {
    std::string t = text;
    if (!t.empty() && t.front() == '(') t = t.substr(1, t.size() - 2);
    Int g(t);
    check(g != 0, "principal ideal generator must be nonzero");
    if (abs(g) == 1) return Ideal{};
    return ideal_of_element(K, K.from_rational(Rat(abs(g))));
}

ProblemConfig parse_problem_config(const std::string& text, FieldRegistry& registry) {
    json j = json::parse(text);
    ProblemConfig cfg;

    const json& jf = j.at("field");
    if (jf.is_string()) {
        cfg.K = registry.require(jf.get<std::string>());
    } else if (jf.contains("poly")) {
        std::string label = jf.at("label").get<std::string>();
        cfg.K = registry.find(label);
        if (!cfg.K) cfg.K = registry.add_inline(jf.dump());
    } else {
        cfg.K = registry.require(jf.at("label").get<std::string>());
    }
    cfg.field_label = cfg.K->label;
    const NumberField& K = *cfg.K;

    if (j.contains("algebra")) {
        const json& ja = j.at("algebra");
        if (ja.contains("a")) {
            FieldElement a = K.element(parse_rat_vec(ja.at("a")));
            FieldElement b = K.element(parse_rat_vec(ja.at("b")));
            cfg.options.ab = std::make_pair(a, b);
            cfg.n_minus = Ideal{};
            for (const auto& q : ramified_primes(K, a, b))
                cfg.n_minus = ideal_mul(cfg.n_minus, ideal_from_prime(q));
        }
        if (ja.contains("nminus"))
            cfg.n_minus = parse_principal_ideal(K, ja.at("nminus").get<std::string>());
    }

    cfg.n_plus = Ideal{};
    if (j.contains("order")) {
        const json& jo = j.at("order");
        if (jo.contains("level"))
            cfg.n_plus = parse_principal_ideal(K, jo.at("level").get<std::string>());
        if (jo.contains("basis")) {
            std::vector<QVec> basis;
            for (const auto& row : jo.at("basis")) basis.push_back(parse_rat_vec(row));
            cfg.options.order_basis = std::move(basis);
        }
    }

    {
        const json& jp = j.at("prime");
        Int p(static_cast<long>(jp.at("p").get<long long>()));
        auto sites = split_prime(K, p);
        check(!sites.empty(), "no degree-1 unramified prime above p=" + p.get_str());
        if (jp.contains("r")) {
            Int r(static_cast<long>(jp.at("r").get<long long>()));
            bool found = false;
            for (auto& s : sites)
                if (mod_pos(s.r, p) == mod_pos(r, p)) {
                    check(!found, "prime selection by r mod p is ambiguous here");
                    cfg.site = s;
                    found = true;
                }
            check(found, "no site above p with the requested root r");
        } else {
            check(sites.size() == 1, "several primes above p; specify r");
            cfg.site = sites[0];
        }
        if (jp.contains("d") && jp.contains("delta")) {
            cfg.site.d = jp.at("d").get<unsigned>();
            cfg.site.delta = K.element(parse_rat_vec(jp.at("delta")));
            Rat nr = cfg.site.delta.norm();
            check(abs(nr.get_num()) == pow_int(p, cfg.site.d) && nr.get_den() == 1,
                  "supplied delta has the wrong norm");
            check(cfg.site.valuation(cfg.site.delta) == cfg.site.d,
                  "supplied delta has the wrong valuation");
        }
    }

    if (j.contains("options")) {
        const json& jo = j.at("options");
        if (jo.contains("max_genus")) cfg.max_genus = jo.at("max_genus").get<unsigned>();
        if (jo.contains("zeta_bound")) cfg.zeta_bound = jo.at("zeta_bound").get<unsigned long>();
        if (jo.contains("seed")) cfg.seed = jo.at("seed").get<std::uint64_t>();
        if (jo.contains("precision_cap"))
            cfg.options.precision_cap = jo.at("precision_cap").get<unsigned long>();
        if (jo.contains("max_class_exponent"))
            cfg.options.max_class_exponent = jo.at("max_class_exponent").get<unsigned>();
    }
    return cfg;
}

ProblemConfig load_problem_config(const std::string& path, FieldRegistry& registry) {
    return parse_problem_config(read_text_file(path), registry);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    check(in.good(), "cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    check(out.good(), "cannot write file: " + path);
    out << content;
}

std::string graph_to_json(const EquivContext& ctx, const QuotientGraph& g,
                          const ProblemConfig& cfg) {
    const Int& p = ctx.site.p;
    json j;
    j["field"] = cfg.field_label;
    j["prime"] = {{"p", p.get_str()},
                  {"r", mod_pos(ctx.site.r, p).get_str()},
                  {"d", ctx.site.d},
                  {"delta", json::array()}};
    for (const auto& c : ctx.site.delta.coords) j["prime"]["delta"].push_back(rat_to_string(c));
    j["Nminus"] = cfg.n_minus.str();
    j["Nplus"] = cfg.n_plus.str();
    j["genus"] = g.genus;
    j["vertices"] = json::array();
    for (const auto& v : g.vertices) j["vertices"].push_back(tree_matrix_str(v.matrix(p)));
    j["edges"] = json::array();
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const EdgeRep& e = g.edges[i];
        VertexRep tgt = target(e, p);
        std::size_t tgt_idx;
        if (auto it = g.vertex_index.find(tgt); it != g.vertex_index.end())
            tgt_idx = it->second;
        else
            tgt_idx = g.vertex_pairings.at(tgt).index;
        j["edges"].push_back({{"id", i},
                              {"src", g.vertex_index.at(source(e))},
                              {"tgt", tgt_idx},
                              {"matrix", tree_matrix_str(e.matrix(p))},
                              {"k", e.k}});
    }
    auto pairing_json = [&](const Pairing& pr, bool edge) {
        json out{{"to", pr.index}, {"gamma", group_to_json(pr.g)}};
        if (edge) out["reversed"] = pr.reversed;
        return out;
    };
    j["vertex_pairings"] = json::object();
    for (const auto& [v, pr] : g.vertex_pairings)
        j["vertex_pairings"][tree_matrix_str(v.matrix(p))] = pairing_json(pr, false);
    j["edge_pairings"] = json::object();
    for (const auto& [e, pr] : g.edge_pairings)
        j["edge_pairings"][tree_matrix_str(e.matrix(p))] = pairing_json(pr, true);
    j["boundary"] = json::object();
    for (const auto& [e, pr] : g.boundary)
        j["boundary"][tree_matrix_str(e.matrix(p))] = pairing_json(pr, true);
    j["stats"] = {{"time_ms", g.time_ms}, {"equiv_calls", g.equiv_calls}};
    return j.dump(1);
}

std::string graph_to_dot(const EquivContext& ctx, const QuotientGraph& g) {
    const Int& p = ctx.site.p;
    std::ostringstream os;
    os << "// genus " << g.genus << ", " << g.vertices.size() << " vertices, "
       << g.edges.size() << " edges\n";
    os << "graph quotient {\n";
    for (std::size_t i = 0; i < g.vertices.size(); ++i)
        os << "  v" << i << " [label=\"" << tree_matrix_str(g.vertices[i].matrix(p))
           << "\"];\n";
    for (const auto& e : g.edges) {
        VertexRep tgt = target(e, p);
        std::size_t tgt_idx;
        if (auto it = g.vertex_index.find(tgt); it != g.vertex_index.end())
            tgt_idx = it->second;
        else
            tgt_idx = g.vertex_pairings.at(tgt).index;
        os << "  v" << g.vertex_index.at(source(e)) << " -- v" << tgt_idx << ";\n";
    }
    os << "}\n";
    return os.str();
}

QuotientGraph graph_from_json(const EquivContext& ctx, const std::string& text) {
    json j = json::parse(text);
    const Int& p = ctx.site.p;
    QuotientGraph g;
    g.p = p;
    check(j.at("prime").at("p").get<std::string>() == p.get_str(),
          "graph file does not match the configured prime");
    g.genus = j.at("genus").get<unsigned>();
    for (const auto& vs : j.at("vertices")) {
        VertexRep v = normalize_vertex(parse_tree_matrix(vs.get<std::string>()), p);
        g.vertex_index[v] = g.vertices.size();
        g.vertices.push_back(v);
    }
    for (const auto& je : j.at("edges")) {
        EdgeRep e = normalize_edge(parse_tree_matrix(je.at("matrix").get<std::string>()), p);
        g.edge_index[e] = g.edges.size();
        g.edges.push_back(e);
    }
    auto parse_pairing = [&](const json& jp, bool edge) {
        Pairing pr;
        pr.index = jp.at("to").get<std::size_t>();
        if (edge && jp.contains("reversed")) pr.reversed = jp.at("reversed").get<bool>();
        pr.g = group_from_json(jp.at("gamma"));
        return pr;
    };
    for (const auto& [key, val] : j.at("vertex_pairings").items())
        g.vertex_pairings.emplace(normalize_vertex(parse_tree_matrix(key), p),
                                  parse_pairing(val, false));
    for (const auto& [key, val] : j.at("edge_pairings").items())
        g.edge_pairings.emplace(normalize_edge(parse_tree_matrix(key), p),
                                parse_pairing(val, true));
    for (const auto& [key, val] : j.at("boundary").items())
        g.boundary.emplace(normalize_edge(parse_tree_matrix(key), p),
                           parse_pairing(val, true));
    return g;
}

}  // namespace btq
