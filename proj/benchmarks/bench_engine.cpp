#include <benchmark/benchmark.h>

#include "fpp/engine.hpp"
#include "fpp/passage_law.hpp"
#include "fpp/weight_field.hpp"

namespace {

void BM_WeightEval(benchmark::State& state) {
    const fpp::WeightField field(1, fpp::make_exponential(1.0), 1);
    const fpp::Transverse x{17};
    std::int64_t layer = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(field.weight_at(layer++, x, fpp::Move{0, 1}));
    }
}
BENCHMARK(BM_WeightEval);

void BM_PointPassage1d(benchmark::State& state) {
    const std::int64_t n = state.range(0);
    const fpp::WeightField field(7, fpp::make_exponential(1.0), 1);
    const fpp::Site source = fpp::origin_site(1);
    const fpp::Site target{n, {0}};
    for (auto _ : state) {
        benchmark::DoNotOptimize(fpp::min_passage_time(field, source, target));
    }
    state.SetItemsProcessed(state.iterations() * n * n / 4);
}
BENCHMARK(BM_PointPassage1d)->Arg(256)->Arg(1024);

void BM_LayerFront2d(benchmark::State& state) {
    const std::int64_t m = state.range(0);
    const fpp::WeightField field(7, fpp::make_exponential(1.0), 2);
    const fpp::Site source = fpp::origin_site(2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fpp::layer_passage_times(field, source, m));
    }
}
BENCHMARK(BM_LayerFront2d)->Arg(32)->Arg(64);

void BM_Geodesic1d(benchmark::State& state) {
    const std::int64_t n = state.range(0);
    const fpp::WeightField field(7, fpp::make_exponential(1.0), 1);
    const fpp::Site source = fpp::origin_site(1);
    const fpp::Site target{n, {0}};
    for (auto _ : state) {
        benchmark::DoNotOptimize(fpp::geodesic(field, source, target));
    }
}
BENCHMARK(BM_Geodesic1d)->Arg(512)->Arg(2048);

}  // namespace

BENCHMARK_MAIN();
