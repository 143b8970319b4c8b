// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <benchmark/benchmark.h>

#include "ppgtts/complexity.hpp"
#include "ppgtts/losses.hpp"

using namespace ppgtts;

namespace {

void BM_Stft1s(benchmark::State& state) {
    Tensor t = rng_fill({16000}, 1, Dist::uniform(-0.8, 0.8));
    std::vector<float> x(t.data.begin(), t.data.end());
    StftConfig cfg;
    for (auto _ : state) {
        auto spec = stft(x, cfg);
        benchmark::DoNotOptimize(spec.real.data.data());
    }
}
BENCHMARK(BM_Stft1s);

void BM_IstftRoundtrip1s(benchmark::State& state) {
    Tensor t = rng_fill({16000}, 2, Dist::uniform(-0.8, 0.8));
    std::vector<float> x(t.data.begin(), t.data.end());
    StftConfig cfg;
    auto spec = stft(x, cfg);
    for (auto _ : state) {
        auto y = istft(spec, 16000);
        benchmark::DoNotOptimize(y.data());
    }
}
BENCHMARK(BM_IstftRoundtrip1s);

// linear vs scaled-dot attention cost as the sequence grows
void BM_Attention(benchmark::State& state) {
    const int t = static_cast<int>(state.range(0));
    const int d = 192, heads = 4;
    AttentionParams p;
    const double a = std::sqrt(1.0 / d);
    p.wq = rng_fill({d, d}, 3, Dist::uniform(-a, a));
    p.wk = rng_fill({d, d}, 4, Dist::uniform(-a, a));
    p.wv = rng_fill({d, d}, 5, Dist::uniform(-a, a));
    p.wo = rng_fill({d, d}, 6, Dist::uniform(-a, a));
    p.bq = Tensor({d});
    p.bk = Tensor({d});
    p.bv = Tensor({d});
    p.bo = Tensor({d});
    p.n_heads = heads;
    p.kind = state.range(1) ? AttentionKind::ScaledDot : AttentionKind::Linear;
    Tensor x = rng_fill({t, d}, 7, Dist::normal(0.0, 1.0));
    for (auto _ : state) {
        Tensor y = attention(x, p);
        benchmark::DoNotOptimize(y.data.data());
    }
}
BENCHMARK(BM_Attention)->Args({80, 0})->Args({80, 1})->Args({320, 0})->Args({320, 1})
    ->Args({1280, 0})->Args({1280, 1});

void BM_SynthesizeMicro(benchmark::State& state) {
    ModelConfig cfg = ModelConfig::micro();
    WeightStore store = init_weights(cfg, 8);
    Ppg ppg{rng_fill({40, cfg.ppg_dim}, 9, Dist::normal(0.0, 1.0))};
    for (auto _ : state) {
        Waveform w = synthesize(ppg, 0, store, cfg, 1.0f, 11);
        benchmark::DoNotOptimize(w.samples.data());
    }
}
BENCHMARK(BM_SynthesizeMicro);

void BM_SynthesizeFull1s(benchmark::State& state) {
    ModelConfig cfg;
    WeightStore store = init_weights(cfg, 10);
    Ppg ppg{rng_fill({80, cfg.ppg_dim}, 11, Dist::normal(0.0, 1.0))};
    for (auto _ : state) {
        Waveform w = synthesize(ppg, 0, store, cfg, 1.0f, 12);
        benchmark::DoNotOptimize(w.samples.data());
    }
}
BENCHMARK(BM_SynthesizeFull1s);

void BM_AnalyzeParams(benchmark::State& state) {
    ModelConfig cfg;
    for (auto _ : state) {
        ComplexityReport r = count_params(cfg, Scope::Inference);
        benchmark::DoNotOptimize(r.total_params);
    }
}
BENCHMARK(BM_AnalyzeParams);

}  // namespace

BENCHMARK_MAIN();
