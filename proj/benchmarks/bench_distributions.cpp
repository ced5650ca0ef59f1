#include <benchmark/benchmark.h>

#include "fpp/distribution_checks.hpp"
#include "fpp/normal.hpp"
#include "fpp/passage_law.hpp"

namespace {

void BM_NormQuantile(benchmark::State& state) {
    double p = 1e-6;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fpp::norm_quantile(p));
        p += 1e-7;
        if (p > 0.999999) p = 1e-6;
    }
}
BENCHMARK(BM_NormQuantile);

void BM_GammaQuantile(benchmark::State& state) {
    const auto law = fpp::make_gamma(2.0, 1.0);
    double p = 0.01;
    for (auto _ : state) {
        benchmark::DoNotOptimize(law->quantile(p));
        p += 1e-4;
        if (p > 0.99) p = 0.01;
    }
}
BENCHMARK(BM_GammaQuantile);

void BM_NearlyGammaScan(benchmark::State& state) {
    const auto law = fpp::make_exponential(1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            fpp::nearly_gamma_scan(*law, {0.01, 50.0, 200}, 100.0));
    }
}
BENCHMARK(BM_NearlyGammaScan);

}  // namespace
