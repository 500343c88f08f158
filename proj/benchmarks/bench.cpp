#include <benchmark/benchmark.h>

#include "aki/eval.hpp"
#include "aki/explain.hpp"
#include "aki/models.hpp"
#include "aki/rng.hpp"
#include "aki/synth.hpp"

namespace {

aki::Dataset make_dataset(std::size_t n, std::size_t p, std::uint64_t seed) {
    aki::Rng rng(seed);
    aki::Dataset ds = aki::Dataset::make(n, p);
    for (std::size_t j = 0; j < p; ++j) ds.meta[j].name = "f" + std::to_string(j);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            const double v = rng.normal();
            ds.values[i * p + j] = v;
            if (j < 3) s += v;
        }
        ds.labels[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-s)) ? 1 : 0;
        ds.split[i] = aki::SplitTag::Train;
    }
    return ds;
}

void bm_auroc(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    aki::Rng rng(7);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = rng.uniform();
        labels[i] = rng.uniform() < 0.3 ? 1 : 0;
    }
    for (auto _ : state) benchmark::DoNotOptimize(aki::auroc(scores, labels));
}
BENCHMARK(bm_auroc)->Arg(1000)->Arg(10000)->Arg(100000);

void bm_gbdt_fit(benchmark::State& state) {
    aki::Dataset ds = make_dataset(static_cast<std::size_t>(state.range(0)), 12, 11);
    aki::Hyperparams hp = aki::default_hyperparams(aki::ModelFamily::Gbdt);
    hp["n_trees"] = 50;
    for (auto _ : state) benchmark::DoNotOptimize(aki::fit_gbdt(ds, hp));
}
BENCHMARK(bm_gbdt_fit)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void bm_shapley(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    aki::Dataset ds = make_dataset(256, static_cast<std::size_t>(p), 13);
    aki::Hyperparams hp = aki::default_hyperparams(aki::ModelFamily::Logistic);
    aki::TrainedModel model = aki::fit_family(ds, aki::ModelFamily::Logistic, hp);
    aki::Dataset background = aki::stratified_background(ds, 64, 17);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            aki::shapley_exact(model, ds.row(0), background, p, 4));
}
BENCHMARK(bm_shapley)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
