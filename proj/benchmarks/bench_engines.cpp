#include <benchmark/benchmark.h>

#include "cpd/detector.hpp"
#include "cpd/forest.hpp"
#include "cpd/knn.hpp"
#include "cpd/likelihood.hpp"
#include "cpd/simgen.hpp"

namespace {

void BM_ForestFit(benchmark::State& state) {
    const auto series = cpd::gen_variable_k(cpd::VariableSource::dirichlet, static_cast<std::size_t>(state.range(0)), 10, 1);
    const std::size_t n = series.X.n();
    for (auto _ : state) {
        auto out = cpd::fit_predict_oob(series.X, {0, n}, n / 2, cpd::ForestParams{}, 1);
        benchmark::DoNotOptimize(out.probs.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ForestFit)->RangeMultiplier(2)->Range(500, 4000)->Unit(benchmark::kMillisecond)->Complexity();

void BM_DistanceCache(benchmark::State& state) {
    const auto series = cpd::gen_variable_k(cpd::VariableSource::dirichlet, static_cast<std::size_t>(state.range(0)), 10, 1);
    for (auto _ : state) {
        auto cache = cpd::build_distance_cache(series.X);
        benchmark::DoNotOptimize(cache.n());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DistanceCache)->RangeMultiplier(2)->Range(500, 4000)->Unit(benchmark::kMillisecond)->Complexity();

void BM_KnnPredict(benchmark::State& state) {
    const auto series = cpd::gen_dirichlet(1);
    const auto cache = cpd::build_distance_cache(series.X);
    for (auto _ : state) {
        auto probs = cpd::loo_predict(cache, {0, 1000}, 500);
        benchmark::DoNotOptimize(probs.data());
    }
}
BENCHMARK(BM_KnnPredict)->Unit(benchmark::kMillisecond);

void BM_GainCurve(benchmark::State& state) {
    const std::size_t m = static_cast<std::size_t>(state.range(0));
    std::vector<double> left(m, -0.1), right(m, -0.2);
    for (auto _ : state) {
        auto curve = cpd::approximate_gain_curve(left, right, {0, m}, 0.01, m);
        benchmark::DoNotOptimize(curve.max_gain);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GainCurve)->RangeMultiplier(4)->Range(1000, 64000)->Complexity(benchmark::oN);

void BM_Detect(benchmark::State& state, cpd::Method method, cpd::LabeledSeries (*make)(std::uint64_t)) {
    const auto series = make(1);
    cpd::DetectionConfig config;
    config.method = method;
    config.seed = 1;
    for (auto _ : state) {
        auto result = cpd::detect(series.X, config);
        benchmark::DoNotOptimize(result.classifier_fits);
    }
}
BENCHMARK_CAPTURE(BM_Detect, cim_rf, cpd::Method::random_forest, cpd::gen_cim)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Detect, dirichlet_rf, cpd::Method::random_forest, cpd::gen_dirichlet)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Detect, dirichlet_knn, cpd::Method::knn, cpd::gen_dirichlet)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Detect, cim_mean, cpd::Method::change_in_mean, cpd::gen_cim)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
