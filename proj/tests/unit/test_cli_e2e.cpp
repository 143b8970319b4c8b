// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// End-to-end checks of the installed command-line surface. The binary path
// comes in via PPGTTS_TOOL_PATH from the build system.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "doctest.h"
#include "ppgtts/config.hpp"
#include "ppgtts/wav_io.hpp"
#include "ppgtts/weights.hpp"
#include "ppgtts/rng.hpp"

#ifndef PPGTTS_TOOL_PATH
#define PPGTTS_TOOL_PATH "ppgtts"
#endif

using namespace ppgtts;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(PPGTTS_TOOL_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return rc == -1 ? -1 : WEXITSTATUS(rc);
}

std::string capture(const std::string& args) {
    const std::string cmd = std::string(PPGTTS_TOOL_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    while (size_t n = fread(buf, 1, sizeof(buf), p)) out.append(buf, n);
    pclose(p);
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

const char* kCfg = "/tmp/ppgtts_e2e_micro.cfg";
const char* kWeights = "/tmp/ppgtts_e2e_weights.bin";

void write_micro_config() {
    std::ofstream f(kCfg);
    f << serialize_config(ModelConfig::micro());
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("analyze runs on the built-in defaults and emits valid JSON") {
    CHECK(run("analyze --scope inference") == 0);
    const std::string json = capture("analyze --scope inference --seconds 1 --json");
    CHECK(json.find("\"total_params\"") != std::string::npos);
    CHECK(json.find("\"gflops\"") != std::string::npos);
    CHECK(run("analyze --scope nonsense") == 1);
    CHECK(run("analyze --convention mac3") == 1);
}

TEST_CASE("init-weights / text2ppg / synthesize / losses pipeline") {
    write_micro_config();
    CHECK(run(std::string("init-weights --config ") + kCfg + " --seed 9 --out " + kWeights) == 0);

    // phoneme ids in the tensor container format
    WeightStore phonemes;
    Tensor ids({6});
    const int id_values[6] = {1, 4, 2, 7, 3, 5};
    for (int i = 0; i < 6; ++i) ids.data[i] = static_cast<float>(id_values[i]);
    phonemes.insert("phoneme_ids", ids);
    save_weights(phonemes, "/tmp/ppgtts_e2e_phonemes.bin");

    CHECK(run(std::string("text2ppg --config ") + kCfg + " --weights " + kWeights +
              " --phonemes /tmp/ppgtts_e2e_phonemes.bin --out /tmp/ppgtts_e2e_ppg.bin") == 0);
    WeightStore ppg_store = load_weights("/tmp/ppgtts_e2e_ppg.bin");
    const Tensor& ppg = ppg_store.get("ppg");
    CHECK(ppg.dim(1) == ModelConfig::micro().ppg_dim);

    CHECK(run(std::string("synthesize --config ") + kCfg + " --weights " + kWeights +
              " --ppg /tmp/ppgtts_e2e_ppg.bin --speaker 1 --temperature 0.8 --seed 3 "
              "--out /tmp/ppgtts_e2e_a.wav") == 0);
    CHECK(run(std::string("synthesize --config ") + kCfg + " --weights " + kWeights +
              " --ppg /tmp/ppgtts_e2e_ppg.bin --speaker 1 --temperature 0.8 --seed 3 "
              "--out /tmp/ppgtts_e2e_b.wav") == 0);
    CHECK(slurp("/tmp/ppgtts_e2e_a.wav") == slurp("/tmp/ppgtts_e2e_b.wav"));  // byte-identical
    Waveform wave = read_wav("/tmp/ppgtts_e2e_a.wav");
    CHECK(wave.samples.size() == ppg.dim(0) * static_cast<size_t>(ModelConfig::micro().hop_length));

    // reference audio long enough for the largest discriminator window
    Waveform ref;
    ref.samples = rng_fill({512}, 44, Dist::uniform(-0.6, 0.6)).data;
    write_wav(ref, "/tmp/ppgtts_e2e_ref.wav");
    WeightStore ppg_ref;
    ppg_ref.insert("ppg", rng_fill({129, ModelConfig::micro().ppg_dim}, 45, Dist::normal(0.0, 1.0)));
    save_weights(ppg_ref, "/tmp/ppgtts_e2e_ppgref.bin");
    const std::string loss_json = capture(std::string("losses --config ") + kCfg + " --weights " +
                                          kWeights +
                                          " --wav /tmp/ppgtts_e2e_ref.wav"
                                          " --ppg /tmp/ppgtts_e2e_ppgref.bin --speaker 0 --json");
    CHECK(loss_json.find("\"l_cvae\"") != std::string::npos);
    CHECK(loss_json.find("\"l_g\"") != std::string::npos);

    CHECK(run(std::string("synthesize --config ") + kCfg + " --weights " + kWeights +
              " --ppg /tmp/ppgtts_e2e_ppg.bin --speaker 99 --out /tmp/x.wav") == 1);  // bad speaker
    CHECK(run("synthesize --weights /nonexistent.bin --ppg /tmp/ppgtts_e2e_ppg.bin "
              "--speaker 0 --out /tmp/x.wav") == 1);
}

TEST_CASE("selftest subcommand reports its checks") {
    const std::string out = capture("selftest --filter rng");
    CHECK(out.find("PASS  rng.determinism") != std::string::npos);
    CHECK(run("selftest") == 0);
}

TEST_SUITE_END();
