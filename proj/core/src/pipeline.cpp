#include "btq/pipeline.hpp"

namespace btq {

std::unique_ptr<ProblemSetup> setup_problem(const NumberField& K, const Ideal& n_minus,
                                            const Ideal& n_plus, PrimeSite site,
                                            const SetupOptions& opts) {
    auto ps = std::make_unique<ProblemSetup>();
    ps->K = &K;
    if (opts.ab) {
        ps->B = make_algebra(K, opts.ab->first, opts.ab->second);
        check(ps->B.definite, "supplied algebra is not totally definite");
        check(ps->B.ram_finite.size() == n_minus.factors.size(),
              "supplied algebra does not match the discriminant");
        for (std::size_t i = 0; i < n_minus.factors.size(); ++i)
            check(ps->B.ram_finite[i] == n_minus.factors[i].first,
                  "supplied algebra does not match the discriminant");
    } else {
        ps->B = algebra_from_discriminant(K, n_minus);
    }
    // the site prime must be split in B and coprime to the level
    for (const auto& rq : ps->B.ram_finite)
        check(!(rq.ideal_hnf == site.ideal_hnf),
              "site prime divides the discriminant (B does not split there)");
    for (const auto& [q, e] : n_plus.factors) {
        (void)e;
        check(!(q.ideal_hnf == site.ideal_hnf), "level must be coprime to the site prime");
    }

    if (opts.order_basis) {
        std::vector<Quaternion> basis;
        for (const auto& flat : *opts.order_basis) basis.push_back(quat_unflatten(ps->B, flat));
        ps->order = make_order(ps->B, basis);
        // verify the discriminant matches disc(B) * N+
        Ideal expect;
        expect.norm = 1;
        for (const auto& rq : ps->B.ram_finite)
            expect = ideal_mul(expect, ideal_from_prime(rq, 1));
        expect = ideal_mul(expect, n_plus);
        check(reduced_discriminant(ps->order).norm == expect.norm,
              "supplied order has the wrong reduced discriminant");
        // a maximal order containing it is still needed for the splitting
        ps->rmax = maximal_order(ps->order);
    } else {
        ps->rmax = maximal_order(standard_order(ps->B));
        ps->order = eichler_order(ps->rmax, n_plus);
    }

    ps->site = std::move(site);
    if (ps->site.d == 0) principalize(ps->site, opts.max_class_exponent);

    SplittingMap iota = build_splitting(ps->B, ps->rmax, ps->site, opts.precision_cap);
    ps->ctx = make_equiv_context(ps->order, ps->rmax, ps->site, std::move(iota));
    return ps;
}

}  // namespace btq
