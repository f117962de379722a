#include <benchmark/benchmark.h>

#include <vector>

#include "kopt/experiment.hpp"
#include "kopt/kaczmarz.hpp"
#include "kopt/linalg.hpp"
#include "kopt/optimizers.hpp"

namespace {

kopt::GeneratedSystem make_system(std::size_t m, std::size_t n) {
    kopt::rng::SplitMix64 rng(42);
    return kopt::generate_system(m, n, rng);
}

void BM_ProjectRow(benchmark::State& state) {
    const auto system = make_system(64, 20);
    std::vector<double> x(20, 0.0);
    std::size_t i = 0;
    for (auto _ : state) {
        x = kopt::project_row(x, system.a.row(i % 64), system.b[i % 64]);
        benchmark::DoNotOptimize(x.data());
        ++i;
    }
}
BENCHMARK(BM_ProjectRow);

void BM_SolverSteps(benchmark::State& state) {
    const auto system = make_system(200, 20);
    const auto normalized = kopt::row_normalize(system.a, system.b);
    const auto p = kopt::DistributionVector::from_row_norms(system.a);
    const std::vector<double> x0(20, 0.0);
    const std::size_t steps = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        const auto record = kopt::run_solver(normalized, x0, kopt::Randomized{p, seed++}, steps,
                                             std::optional<std::vector<double>>(system.x));
        benchmark::DoNotOptimize(record.squared_errors.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(steps));
}
BENCHMARK(BM_SolverSteps)->Arg(500);

void BM_WeightedGram(benchmark::State& state) {
    const auto system = make_system(200, 20);
    const auto normalized = kopt::row_normalize(system.a, system.b);
    const auto p = kopt::DistributionVector::uniform(200);
    for (auto _ : state) {
        const auto gram = kopt::weighted_gram(normalized.unit_rows, p);
        benchmark::DoNotOptimize(gram.data().data());
    }
}
BENCHMARK(BM_WeightedGram);

void BM_JacobiEig(benchmark::State& state) {
    const auto system = make_system(200, static_cast<std::size_t>(state.range(0)));
    const auto normalized = kopt::row_normalize(system.a, system.b);
    const auto gram = kopt::weighted_gram(normalized.unit_rows,
                                          kopt::DistributionVector::uniform(200));
    for (auto _ : state) {
        const auto decomposition = kopt::eig_symmetric(gram);
        benchmark::DoNotOptimize(decomposition.values.data());
    }
}
BENCHMARK(BM_JacobiEig)->Arg(20)->Arg(64);

void BM_SamplerDraw(benchmark::State& state) {
    const std::size_t m = static_cast<std::size_t>(state.range(0));
    kopt::rng::SplitMix64 rng(7);
    std::vector<double> w(m);
    double total = 0.0;
    for (double& v : w) {
        v = rng.next_double() + 1e-3;
        total += v;
    }
    for (double& v : w) v /= total;
    kopt::RowSampler sampler(kopt::DistributionVector(w), 11);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sampler.draw());
    }
}
BENCHMARK(BM_SamplerDraw)->Arg(32)->Arg(256);

void BM_OptimizeLp(benchmark::State& state) {
    const auto system = make_system(200, 20);
    const auto normalized = kopt::row_normalize(system.a, system.b);
    for (auto _ : state) {
        const auto result = kopt::optimize_lp(normalized.unit_rows);
        benchmark::DoNotOptimize(result.t_hat);
    }
}
BENCHMARK(BM_OptimizeLp);

void BM_OptimizeDopt(benchmark::State& state) {
    const auto system = make_system(200, 20);
    const auto normalized = kopt::row_normalize(system.a, system.b);
    const auto init = kopt::DistributionVector::from_row_norms(system.a);
    for (auto _ : state) {
        const auto result = kopt::optimize_dopt(init, normalized.unit_rows, 10);
        benchmark::DoNotOptimize(result.t_hat);
    }
}
BENCHMARK(BM_OptimizeDopt);

void BM_OptimizeMaximin(benchmark::State& state) {
    const auto system = make_system(static_cast<std::size_t>(state.range(0)),
                                    static_cast<std::size_t>(state.range(1)));
    const auto normalized = kopt::row_normalize(system.a, system.b);
    for (auto _ : state) {
        const auto result = kopt::optimize_maximin(normalized.unit_rows, 1e-6, 4000);
        benchmark::DoNotOptimize(result.t_hat);
    }
}
BENCHMARK(BM_OptimizeMaximin)->Args({40, 6});

}  // namespace

BENCHMARK_MAIN();
