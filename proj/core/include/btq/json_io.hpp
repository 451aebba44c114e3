#ifndef BTQ_JSON_IO_HPP
#define BTQ_JSON_IO_HPP

#include <string>
#include <vector>

#include "btq/pipeline.hpp"

namespace btq {

// Loads every field table (*.json) in a directory; labels must be unique
// within the registry. Fields are pinned (unique_ptr) for pointer
// stability.
class FieldRegistry {
  public:
    void load_file(const std::string& path);
    void load_directory(const std::string& dir);
    // parse one table entry given as a JSON object string
    const NumberField* add_inline(const std::string& json_object_text);
    const NumberField* find(const std::string& label) const;  // null if absent
    const NumberField* require(const std::string& label) const;
    std::vector<const NumberField*> all() const;

  private:
    std::vector<std::unique_ptr<NumberField>> fields_;
};

// Problem configuration resolved against a registry.
struct ProblemConfig {
    const NumberField* K = nullptr;
    Ideal n_minus;
    Ideal n_plus;
    PrimeSite site;
    SetupOptions options;
    std::optional<unsigned> max_genus;
    unsigned long zeta_bound = 1000000;
    std::uint64_t seed = 0;
    std::string field_label;
};

ProblemConfig parse_problem_config(const std::string& json_text, FieldRegistry& registry);
ProblemConfig load_problem_config(const std::string& path, FieldRegistry& registry);

// Graph serialization per the external interface: matrices as
// "[[a,b],[c,d]]" strings, group elements as {coords, t}.
std::string graph_to_json(const EquivContext& ctx, const QuotientGraph& g,
                          const ProblemConfig& cfg);
std::string graph_to_dot(const EquivContext& ctx, const QuotientGraph& g);

// Reload a graph written by graph_to_json for reduce queries. The setup
// must match the one that produced the file (verified by key fields).
QuotientGraph graph_from_json(const EquivContext& ctx, const std::string& json_text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Ideal <-> short text: "(1)" or a principal integer generator "(21)".
Ideal parse_principal_ideal(const NumberField& K, const std::string& text);

}  // namespace btq

#endif
