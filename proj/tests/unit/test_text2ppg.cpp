// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>

#include "doctest.h"
#include "ppgtts/rng.hpp"
#include "ppgtts/text2ppg.hpp"

using namespace ppgtts;

namespace {

ModelConfig micro() { return ModelConfig::micro(); }

Text2PpgWeights micro_weights(uint64_t seed) {
    static thread_local WeightStore store;  // reloaded per seed below
    store = init_weights(micro(), seed);
    return load_text2ppg(micro(), float_source(store));
}

}  // namespace

TEST_SUITE_BEGIN("text2ppg");

TEST_CASE("length regulation with unit durations is the identity") {
    Tensor h = rng_fill({4, 3}, 1, Dist::normal(0.0, 1.0));
    Tensor out = length_regulate(h, {1, 1, 1, 1});
    CHECK(out.shape == h.shape);
    CHECK(out.data == h.data);
}

TEST_CASE("length regulation repeats rows in order") {
    Tensor h({2, 2});
    h.at(0, 0) = 1.0f;
    h.at(0, 1) = 2.0f;
    h.at(1, 0) = 3.0f;
    h.at(1, 1) = 4.0f;
    Tensor out = length_regulate(h, {2, 3});
    REQUIRE(out.dim(0) == 5);
    for (int r : {0, 1}) {
        CHECK(out.at(r, 0) == 1.0f);
        CHECK(out.at(r, 1) == 2.0f);
    }
    for (int r : {2, 3, 4}) {
        CHECK(out.at(r, 0) == 3.0f);
        CHECK(out.at(r, 1) == 4.0f);
    }
}

TEST_CASE("length regulation row counts equal the durations") {
    Tensor h = rng_fill({4, 5}, 2, Dist::normal(0.0, 1.0));
    const std::vector<int> durations{3, 0, 6, 2};  // sums to 11
    Tensor out = length_regulate(h, durations);
    REQUIRE(out.dim(0) == 11);
    int row = 0;
    for (int i = 0; i < 4; ++i) {
        for (int r = 0; r < durations[i]; ++r) {
            for (int c = 0; c < 5; ++c) CHECK(out.at(row, c) == h.at(i, c));
            ++row;
        }
    }
}

TEST_CASE("length regulation rejects bad durations") {
    Tensor h = rng_fill({3, 2}, 3, Dist::normal(0.0, 1.0));
    CHECK_THROWS(length_regulate(h, {1, 1}));        // size mismatch
    CHECK_THROWS(length_regulate(h, {0, 0, 0}));     // all zero
    CHECK_THROWS(length_regulate(h, {1, -1, 1}));    // negative
}

TEST_CASE("doubling every duration doubles the frame count and repeats") {
    Tensor h = rng_fill({3, 4}, 4, Dist::normal(0.0, 1.0));
    const std::vector<int> d1{1, 2, 3};
    std::vector<int> d2{2, 4, 6};
    Tensor a = length_regulate(h, d1);
    Tensor b = length_regulate(h, d2);
    CHECK(b.dim(0) == 2 * a.dim(0));
}

TEST_CASE("zeroed duration predictor yields all-ones durations") {
    ModelConfig cfg = micro();
    WeightStore store = init_weights(cfg, 7);
    for (const TensorSpec& spec : tensor_inventory(cfg)) {
        if (spec.name.rfind("t2p.duration", 0) == 0) {
            for (float& v : store.mutable_get(spec.name).data) v = 0.0f;
        }
    }
    auto w = load_text2ppg(cfg, float_source(store));
    Tensor h = rng_fill({5, cfg.text2ppg_hidden}, 8, Dist::normal(0.0, 1.0));
    const auto durations = predict_durations(h, w);
    REQUIRE(durations.size() == 5);
    for (int d : durations) CHECK(d == 1);  // exp(0) = 1
}

TEST_CASE("predicted durations are positive and one per token") {
    auto w = micro_weights(11);
    for (int t : {1, 3, 9}) {
        Tensor h = rng_fill({t, 8}, 20 + t, Dist::normal(0.0, 1.0));
        const auto durations = predict_durations(h, w);
        CHECK(static_cast<int>(durations.size()) == t);
        for (int d : durations) CHECK(d >= 1);
    }
}

TEST_CASE("forward with an override produces one frame per unit duration") {
    auto w = micro_weights(12);
    PhonemeSequence seq{{1, 2, 3}};
    const std::vector<int> override{1, 1, 1};
    auto out = text2ppg_forward(seq, w, &override);
    CHECK(out.ppg.dim(0) == 3);
    CHECK(out.ppg.dim(1) == micro().ppg_dim);
    CHECK(out.durations == override);
}

TEST_CASE("forward is deterministic") {
    auto w = micro_weights(13);
    PhonemeSequence seq{{5, 1, 7, 7, 2}};
    auto a = text2ppg_forward(seq, w);
    auto b = text2ppg_forward(seq, w);
    CHECK(a.ppg.data == b.ppg.data);
    CHECK(a.durations == b.durations);
}

TEST_CASE("frame count equals the duration sum on random inputs") {
    auto w = micro_weights(14);
    Rng rng(15);
    PhonemeSequence seq;
    for (int i = 0; i < 10; ++i) {
        seq.ids.push_back(static_cast<int>(rng.next_u64() % micro().vocab_size));
    }
    auto out = text2ppg_forward(seq, w);
    long long total = 0;
    for (int d : out.durations) total += d;
    CHECK(out.ppg.dim(0) == total);
    CHECK(all_finite(out.ppg));
}

TEST_CASE("unused vocabulary rows do not leak into the output") {
    ModelConfig cfg = micro();
    WeightStore store = init_weights(cfg, 16);
    PhonemeSequence seq{{1, 2, 3}};
    auto w = load_text2ppg(cfg, float_source(store));
    auto base = text2ppg_forward(seq, w);

    // scramble embedding rows the sequence never touches
    Tensor& emb = store.mutable_get("t2p.embedding");
    for (int row : {0, 5, 9, 12}) {
        for (int c = 0; c < cfg.text2ppg_hidden; ++c) emb.at(row, c) = 99.0f + row + c;
    }
    auto w2 = load_text2ppg(cfg, float_source(store));
    auto scrambled = text2ppg_forward(seq, w2);
    CHECK(base.ppg.data == scrambled.ppg.data);
    CHECK(base.durations == scrambled.durations);
}

TEST_CASE("invalid ids and overrides are rejected") {
    auto w = micro_weights(17);
    CHECK_THROWS(text2ppg_forward(PhonemeSequence{{}}, w));
    CHECK_THROWS(text2ppg_forward(PhonemeSequence{{999}}, w));
    PhonemeSequence seq{{1, 2}};
    const std::vector<int> zeros{0, 0};
    CHECK_THROWS(text2ppg_forward(seq, w, &zeros));
}

TEST_SUITE_END();
