#include "klab/approx.hpp"
#include "klab/bohr.hpp"
#include "klab/measure.hpp"
#include "klab/qia.hpp"
#include "klab/shiftred.hpp"
#include "klab/surrogate.hpp"

#include <benchmark/benchmark.h>

#include <algorithm>

using namespace klab;

namespace {

ApproxFunction two_point(std::int64_t q, const Ratio& pq, std::int64_t r, const Ratio& pr) {
    ApproxFunction psi;
    psi.set(q, pq);
    psi.set(r, pr);
    return psi;
}

void BM_FirstKind(benchmark::State& st) {
    IrrationalSurrogate g = surrogate_preset("quad-pair");
    for (auto _ : st) benchmark::DoNotOptimize(first_kind(g, st.range(0)));
}
BENCHMARK(BM_FirstKind)->Arg(8)->Arg(16)->Arg(24);

void BM_ResidueSet(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(residue_set(st.range(0), 7, {2, 3}).count);
}
BENCHMARK(BM_ResidueSet)->Arg(64)->Arg(256)->Arg(500);

void BM_BoxCountMobius(benchmark::State& st) {
    const Vec2Q y{Ratio(3, 8), Ratio(5, 8)};
    for (auto _ : st) benchmark::DoNotOptimize(box_count_mobius(st.range(0), 7, {2, 3}, y));
}
BENCHMARK(BM_BoxCountMobius)->Arg(64)->Arg(500)->Arg(5000);

void BM_OverlapFast(benchmark::State& st) {
    IrrationalSurrogate g = surrogate_preset("liouville");
    ApproxTable t(g, Ratio(2, 3));
    t.warm(16);
    const std::int64_t q = st.range(0), r = q * 3 / 4 + 1;
    ApproxFunction psi = two_point(q, Ratio(1, 64), r, Ratio(3, 256));
    for (auto _ : st) benchmark::DoNotOptimize(overlap_fast(q, r, psi, g, t, true, Detail::MeasureOnly).measure);
}
BENCHMARK(BM_OverlapFast)->Arg(120)->Arg(1000)->Arg(4000);

void BM_OverlapBrute(benchmark::State& st) {
    IrrationalSurrogate g = surrogate_preset("liouville");
    ApproxTable t(g, Ratio(2, 3));
    t.warm(16);
    const std::int64_t q = st.range(0), r = q * 3 / 4 + 1;
    ApproxFunction psi = two_point(q, Ratio(1, 64), r, Ratio(3, 256));
    for (auto _ : st) benchmark::DoNotOptimize(overlap_bruteforce(q, r, psi, g, t, true).measure);
}
BENCHMARK(BM_OverlapBrute)->Arg(60)->Arg(120);

void BM_BohrCount(benchmark::State& st) {
    IrrationalSurrogate g = surrogate_preset("quad-sqrt2");
    for (auto _ : st) benchmark::DoNotOptimize(bohr_count({g, st.range(0), Ratio(1, 32), {}}));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_BohrCount)->Arg(1 << 10)->Arg(1 << 16);

void BM_BlockSums(benchmark::State& st) {
    Prng rng = Prng::derive(1, 2);
    const long a = st.range(0);
    auto qs = block_support(a, 40, rng);
    auto rs = block_support(a - 2, 40, rng);
    qs.insert(qs.end(), rs.begin(), rs.end());
    std::sort(qs.begin(), qs.end());
    qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
    BlockSpec spec{std::int64_t{1} << a, std::int64_t{1} << (a - 2), psi_sparse_levels(qs, rng),
                   surrogate_preset("quad-pair"), Ratio(2, 3), true};
    ApproxTable t = block_table(spec);
    for (auto _ : st) benchmark::DoNotOptimize(block_sums(spec, t).lhs);
}
BENCHMARK(BM_BlockSums)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_ModelSum(benchmark::State& st) {
    ModelSpec spec;
    spec.M = st.range(0);
    spec.gamma = surrogate_preset("liouville");
    spec.variant = ModelVariant::Shiftb;
    spec.support = SupportKind::Clusters;
    auto support = model_support(spec);
    for (auto _ : st) benchmark::DoNotOptimize(model_sum(spec, support));
}
BENCHMARK(BM_ModelSum)->Arg(64)->Arg(1024)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
