#ifndef BTQ_PIPELINE_HPP
#define BTQ_PIPELINE_HPP

#include <memory>

#include "btq/fundom.hpp"

namespace btq {

// Everything needed to run domain computations for one (p, N-, N+) datum.
// Heap-allocated and pinned: the orders and context hold pointers into
// sibling members.
struct ProblemSetup {
    const NumberField* K = nullptr;
    QuaternionAlgebra B;
    QuatOrder rmax;
    QuatOrder order;  // Eichler order of level N+
    PrimeSite site;
    EquivContext ctx;

    ProblemSetup() = default;
    ProblemSetup(const ProblemSetup&) = delete;
    ProblemSetup& operator=(const ProblemSetup&) = delete;
};

struct SetupOptions {
    unsigned long precision_cap = 64;
    unsigned max_class_exponent = 8;
    // explicit algebra presentation; searched from n_minus when absent
    std::optional<std::pair<FieldElement, FieldElement>> ab;
    // explicit order basis (flattened rational coords), bypassing the
    // maximal/Eichler construction; verified, not trusted
    std::optional<std::vector<QVec>> order_basis;
};

std::unique_ptr<ProblemSetup> setup_problem(const NumberField& K, const Ideal& n_minus,
                                            const Ideal& n_plus, PrimeSite site,
                                            const SetupOptions& opts = {});

}  // namespace btq

#endif
