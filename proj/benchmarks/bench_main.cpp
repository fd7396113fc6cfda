#include <benchmark/benchmark.h>

#include "dknn/io.hpp"
#include "dknn/knn.hpp"
#include "dknn/selection.hpp"

namespace {

using namespace dknn;

void bm_oracle_knn(benchmark::State& state) {
    const auto n = static_cast<std::uint64_t>(state.range(0));
    const Dataset ds = generate_dataset(n, 2, 8, 11, Distribution::Uniform);
    const Point q = random_query(2, 11, 0);
    for (auto _ : state) {
        auto ids = oracle_knn(ds, q, 64, Metric::L2Squared);
        benchmark::DoNotOptimize(ids);
    }
}
BENCHMARK(bm_oracle_knn)->Arg(1 << 12)->Arg(1 << 16);

void bm_run_knn(benchmark::State& state) {
    const auto n = static_cast<std::uint64_t>(state.range(0));
    const Dataset ds = generate_dataset(n, 2, 8, 11, Distribution::Uniform);
    const auto machines = partition(ds, 8, 11, PartitionPolicy::UniformRandom);
    const Point q = random_query(2, 11, 0);
    KnnConfig cfg;
    cfg.l = 256;
    cfg.seed = 11;
    std::uint64_t trial = 0;
    for (auto _ : state) {
        auto res = run_knn(machines, q, cfg, trial++, /*keep_log=*/false);
        benchmark::DoNotOptimize(res);
    }
}
BENCHMARK(bm_run_knn)->Arg(1 << 12)->Arg(1 << 16);

void bm_run_baseline(benchmark::State& state) {
    const auto n = static_cast<std::uint64_t>(state.range(0));
    const Dataset ds = generate_dataset(n, 2, 8, 11, Distribution::Uniform);
    const auto machines = partition(ds, 8, 11, PartitionPolicy::UniformRandom);
    const Point q = random_query(2, 11, 0);
    std::uint64_t trial = 0;
    for (auto _ : state) {
        auto res = run_baseline(machines, q, 256, Metric::L2Squared, 11,
                                trial++, /*keep_log=*/false);
        benchmark::DoNotOptimize(res);
    }
}
BENCHMARK(bm_run_baseline)->Arg(1 << 12)->Arg(1 << 16);

}  // namespace

BENCHMARK_MAIN();
