// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "ppgtts/config.hpp"
#include "ppgtts/wav_io.hpp"
#include "ppgtts/weights.hpp"
#include "ppgtts/rng.hpp"

using namespace ppgtts;

namespace {

std::string temp_path(const char* name) { return std::string("/tmp/ppgtts_test_") + name; }

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_SUITE_BEGIN("cli_io");

TEST_CASE("weight container round-trips bit-exactly with order preserved") {
    ModelConfig cfg = ModelConfig::micro();
    WeightStore store = init_weights(cfg, 77);
    const std::string path = temp_path("roundtrip.bin");
    save_weights(store, path);
    WeightStore loaded = load_weights(path);
    REQUIRE(loaded.size() == store.size());
    CHECK(loaded.names() == store.names());
    for (const std::string& name : store.names()) {
        CHECK(loaded.get(name).shape == store.get(name).shape);
        CHECK(loaded.get(name).data == store.get(name).data);
    }
    std::remove(path.c_str());
}

TEST_CASE("corrupt magic is rejected without a partial store") {
    ModelConfig cfg = ModelConfig::micro();
    WeightStore store = init_weights(cfg, 78);
    const std::string path = temp_path("magic.bin");
    save_weights(store, path);
    std::string bytes = slurp(path);
    bytes[0] = 'X';
    spit(path, bytes);
    CHECK_THROWS_WITH_AS(load_weights(path), "weight file: bad magic", std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("unsupported version and truncation are rejected") {
    ModelConfig cfg = ModelConfig::micro();
    WeightStore store = init_weights(cfg, 79);
    const std::string path = temp_path("trunc.bin");
    save_weights(store, path);
    std::string bytes = slurp(path);

    std::string bad_version = bytes;
    bad_version[4] = 2;
    spit(path, bad_version);
    CHECK_THROWS(load_weights(path));

    spit(path, bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS(load_weights(path));
    std::remove(path.c_str());
}

TEST_CASE("duplicate tensor names are rejected") {
    WeightStore store;
    store.insert("a", rng_fill({2, 2}, 1, Dist::uniform(-1, 1)));
    CHECK_THROWS(store.insert("a", rng_fill({2, 2}, 2, Dist::uniform(-1, 1))));

    // and on disk: duplicate the single-tensor body
    const std::string path = temp_path("dup.bin");
    save_weights(store, path);
    std::string bytes = slurp(path);
    std::string body = bytes.substr(12);
    std::string doubled = bytes.substr(0, 8);
    doubled.push_back(2);  // tensor_count = 2 (little-endian u32)
    doubled.push_back(0);
    doubled.push_back(0);
    doubled.push_back(0);
    doubled += body;
    doubled += body;
    spit(path, doubled);
    CHECK_THROWS(load_weights(path));
    std::remove(path.c_str());
}

TEST_CASE("init_weights is deterministic per seed and covers the inventory") {
    ModelConfig cfg = ModelConfig::micro();
    WeightStore a = init_weights(cfg, 5);
    WeightStore b = init_weights(cfg, 5);
    WeightStore c = init_weights(cfg, 6);
    REQUIRE(a.size() == b.size());
    bool all_equal = true, any_diff = false;
    for (const std::string& name : a.names()) {
        all_equal = all_equal && a.get(name).data == b.get(name).data;
        any_diff = any_diff || a.get(name).data != c.get(name).data;
    }
    CHECK(all_equal);
    CHECK(any_diff);
    CHECK(a.size() == tensor_inventory(cfg).size());
}

TEST_CASE("store validation fails eagerly on a missing tensor") {
    ModelConfig cfg = ModelConfig::micro();
    WeightStore store = init_weights(cfg, 7);
    validate_store(store, cfg, Scope::Training);

    WeightStore partial;
    for (const std::string& name : store.names()) {
        if (name == "dec.spk.weight") continue;
        partial.insert(name, store.get(name));
    }
    CHECK_THROWS(validate_store(partial, cfg, Scope::Inference));
}

TEST_CASE("wav writer produces the canonical 44-byte header layout") {
    Waveform w;
    w.samples.assign(16000, 0.0f);
    const std::string path = temp_path("silence.wav");
    WavWriteResult res = write_wav(w, path);
    CHECK(res.bytes == 44 + 32000);
    CHECK(res.clipped == 0);
    CHECK(slurp(path).size() == 44 + 32000);
    std::remove(path.c_str());
}

TEST_CASE("full-scale sample maps to 32767 and clipping is counted") {
    Waveform w;
    w.samples = {1.0f, -1.0f, 2.0f};
    const std::string path = temp_path("scale.wav");
    WavWriteResult res = write_wav(w, path);
    CHECK(res.clipped == 1);
    const std::string bytes = slurp(path);
    const int16_t first = static_cast<int16_t>(static_cast<uint8_t>(bytes[44]) |
                                               (static_cast<uint8_t>(bytes[45]) << 8));
    CHECK(first == 32767);
    std::remove(path.c_str());
}

TEST_CASE("wav round-trip via an independent reader stays within one quantization step") {
    Waveform w;
    w.samples = rng_fill({3000}, 91, Dist::uniform(-0.99, 0.99)).data;
    const std::string path = temp_path("rt.wav");
    write_wav(w, path);

    // independent minimal parser: fixed 44-byte header, PCM16 payload
    const std::string bytes = slurp(path);
    REQUIRE(bytes.size() == 44 + w.samples.size() * 2);
    for (size_t i = 0; i < w.samples.size(); ++i) {
        const int16_t pcm = static_cast<int16_t>(static_cast<uint8_t>(bytes[44 + 2 * i]) |
                                                 (static_cast<uint8_t>(bytes[45 + 2 * i]) << 8));
        CHECK(std::abs(pcm / 32767.0f - w.samples[i]) <= 1.0f / 32768.0f);
    }

    Waveform back = read_wav(path);
    REQUIRE(back.samples.size() == w.samples.size());
    for (size_t i = 0; i < w.samples.size(); ++i) {
        CHECK(std::abs(back.samples[i] - w.samples[i]) <= 1.0f / 32768.0f);
    }
    std::remove(path.c_str());
}

TEST_CASE("config files parse, serialize and reject unknown keys") {
    ModelConfig cfg;  // defaults
    const std::string text = serialize_config(cfg);
    ModelConfig back = parse_config(text);
    CHECK(serialize_config(back) == text);

    ModelConfig partial = parse_config("latent_dim = 8\nflow_hidden = 8 # trailing comment\n");
    CHECK(partial.latent_dim == 8);
    CHECK(partial.flow_hidden == 8);
    CHECK(partial.fft_size == 1024);  // untouched default

    CHECK_THROWS_WITH_AS(parse_config("latnet_dim = 8\n"),
                         "config: unknown key 'latnet_dim' (line 1)", std::invalid_argument);
    CHECK_THROWS(parse_config("latent_dim : 8\n"));
    CHECK_THROWS(parse_config("latent_dim = eight\n"));
}

TEST_CASE("config validation rejects inconsistent settings") {
    ModelConfig cfg;
    cfg.decoder_channels = {256, 384, 1000};  // != 2*(fft/2+1)
    CHECK_THROWS(cfg.validate());

    ModelConfig cfg2;
    cfg2.decoder_res_groups = {5, 8, 18};  // 256 % 5 != 0
    CHECK_THROWS(cfg2.validate());

    ModelConfig cfg3;
    cfg3.text2ppg_heads = 3;  // 128 % 3 != 0
    CHECK_THROWS(cfg3.validate());

    ModelConfig cfg4;
    cfg4.flow_kernel = 4;  // even kernel
    CHECK_THROWS(cfg4.validate());

    ModelConfig cfg5;
    cfg5.disc_hops = {128, 256};  // list length mismatch
    CHECK_THROWS(cfg5.validate());
}

TEST_CASE("micro preset is a valid config") {
    ModelConfig cfg = ModelConfig::micro();
    cfg.validate();
    CHECK(cfg.posterior_layers == 2);
    CHECK(cfg.posterior_hidden == 8);
}

TEST_SUITE_END();
