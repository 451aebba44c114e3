#include <benchmark/benchmark.h>

#include "btq/pipeline.hpp"
#include "fields_fixture.hpp"

using namespace btq;

namespace {

std::unique_ptr<ProblemSetup>& hamilton5() {
    static auto K = make_Q();
    static auto ps = [] {
        auto q2 = primes_above(*K, Int(2));
        auto sites = split_prime(*K, Int(5));
        return setup_problem(*K, ideal_from_prime(q2[0]), Ideal{}, sites[0]);
    }();
    return ps;
}

VertexRep walk(Rng& rng, const Int& p, unsigned dist) {
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

}  // namespace

static void BM_NormalizeVertex(benchmark::State& state) {
    Int p(11);
    Rng rng(1);
    TreeMat m{Int(1234567), Int(-887), Int(44521), Int(9713)};
    for (auto _ : state) benchmark::DoNotOptimize(normalize_vertex(m, p));
}
BENCHMARK(BM_NormalizeVertex);

static void BM_LLLRank8(benchmark::State& state) {
    Rng rng(2);
    GramForm g{QMat(8, QVec(8, Rat(0)))};
    for (int i = 0; i < 8; ++i) g.g[i][i] = 1;
    ZMat basis(8, ZVec(8));
    for (auto& row : basis)
        for (auto& x : row) x = Int(rng.next_signed(-1000000, 1000000));
    for (auto _ : state) benchmark::DoNotOptimize(lll(basis, g));
}
BENCHMARK(BM_LLLRank8);

static void BM_HowellKernel(benchmark::State& state) {
    Rng rng(3);
    Int p(11);
    unsigned long N = 13;
    Int pn = pow_int(p, N);
    ZMat a(12, ZVec(4));
    for (auto& row : a)
        for (auto& x : row) x = Int(rng.next(1000000));
    for (auto _ : state) benchmark::DoNotOptimize(howell_left_kernel_z(p, N, a));
}
BENCHMARK(BM_HowellKernel);

static void BM_IsEquivalent(benchmark::State& state) {
    auto& ps = hamilton5();
    Rng rng(4);
    unsigned dist = static_cast<unsigned>(state.range(0));
    std::vector<VertexRep> targets;
    for (int i = 0; i < 16; ++i) targets.push_back(walk(rng, ps->ctx.site.p, dist));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(is_equivalent(ps->ctx, origin_vertex(), targets[i]));
        i = (i + 1) % targets.size();
    }
}
BENCHMARK(BM_IsEquivalent)->Arg(4)->Arg(10)->Arg(20);

static void BM_ShortVectorsD4(benchmark::State& state) {
    GramForm g{QMat{{Rat(2), Rat(0), Rat(0), Rat(1)},
                    {Rat(0), Rat(2), Rat(0), Rat(1)},
                    {Rat(0), Rat(0), Rat(2), Rat(1)},
                    {Rat(1), Rat(1), Rat(1), Rat(2)}}};
    ZMat basis(4, ZVec(4, Int(0)));
    for (int i = 0; i < 4; ++i) basis[i][i] = 1;
    for (auto _ : state) benchmark::DoNotOptimize(short_vectors(basis, g, Rat(20)));
}
BENCHMARK(BM_ShortVectorsD4);

BENCHMARK_MAIN();
