// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "ppgtts/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "ppgtts/complexity.hpp"
#include "ppgtts/losses.hpp"
#include "ppgtts/wav_io.hpp"

namespace ppgtts {

namespace {

struct Check {
    std::string name;
    std::function<std::string()> run;  // empty string = pass, otherwise failure detail
};

std::string expect(bool ok, const std::string& what) { return ok ? "" : what; }

std::string check_rng_determinism() {
    Tensor a = rng_fill({64}, 1234, Dist::normal(0.0, 1.0));
    Tensor b = rng_fill({64}, 1234, Dist::normal(0.0, 1.0));
    for (size_t i = 0; i < a.data.size(); ++i) {
        if (a.data[i] != b.data[i]) return "stream not bit-identical";
    }
    Tensor c = rng_fill({4}, 7, Dist::uniform(0.0, 0.0));
    for (float v : c.data) {
        if (v != 0.0f) return "degenerate uniform not zero";
    }
    return "";
}

std::string check_rng_moments() {
    Tensor t = rng_fill({100000}, 99, Dist::normal(0.0, 1.0));
    double mean = 0.0;
    for (float v : t.data) mean += v;
    mean /= t.numel();
    double var = 0.0;
    for (float v : t.data) var += (v - mean) * (v - mean);
    var /= t.numel();
    char buf[128];
    std::snprintf(buf, sizeof(buf), "mean=%.5f var=%.5f", mean, var);
    if (mean <= -0.02 || mean >= 0.02 || var <= 0.95 || var >= 1.05) return buf;
    return "";
}

std::string check_conv_linearity() {
    Tensor x1 = rng_fill({3, 17}, 11, Dist::normal(0.0, 1.0));
    Tensor x2 = rng_fill({3, 17}, 12, Dist::normal(0.0, 1.0));
    Tensor w = rng_fill({5, 3, 3}, 13, Dist::normal(0.0, 0.5));
    const float a = 1.7f;
    Tensor mix({3, 17});
    for (size_t i = 0; i < mix.data.size(); ++i) mix.data[i] = a * x1.data[i] + x2.data[i];
    Tensor lhs = conv1d(mix, w, nullptr);
    Tensor y1 = conv1d(x1, w, nullptr);
    Tensor y2 = conv1d(x2, w, nullptr);
    double err = 0.0;
    for (size_t i = 0; i < lhs.data.size(); ++i) {
        err = std::max(err, std::abs(static_cast<double>(lhs.data[i]) - (a * y1.data[i] + y2.data[i])));
    }
    return expect(err < 1e-5, "linearity violation " + std::to_string(err));
}

std::string check_dual_polynomial() {
    // f(x) = 3x^3 - 2x + 5, f'(x) = 9x^2 - 2
    const double x0 = 1.37;
    Dual<double> x(x0, 1.0);
    Dual<double> f = Dual<double>(3) * x * x * x - Dual<double>(2) * x + Dual<double>(5);
    const double expected = 9.0 * x0 * x0 - 2.0;
    return expect(std::abs(f.t - expected) < 1e-12, "dual derivative mismatch");
}

std::string check_cola() {
    const double dev = cola_deviation(StftConfig{});
    return expect(dev < 1e-6, "cola deviation " + std::to_string(dev));
}

std::string check_stft_roundtrip() {
    Tensor w = rng_fill({16000}, 21, Dist::uniform(-0.8, 0.8));
    std::vector<float> x(w.data.begin(), w.data.end());
    StftConfig cfg;
    auto spec = stft(x, cfg);
    auto y = istft(spec, static_cast<int>(x.size()));
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - y[i]) * (x[i] - y[i]);
        den += x[i] * x[i];
    }
    const double rel = std::sqrt(num / den);
    return expect(rel < 1e-6, "roundtrip rel L2 " + std::to_string(rel));
}

std::string check_attention_t1() {
    ModelConfig cfg = ModelConfig::micro();
    WeightStore store = init_weights(cfg, 5);
    auto src = float_source(store);
    auto block = load_fft_block(src, "prior.block0", cfg.prior_hidden, cfg.prior_filter,
                                cfg.ff_kernel1, cfg.ff_kernel2, cfg.prior_heads,
                                AttentionKind::Linear);
    Tensor x = rng_fill({1, cfg.prior_hidden}, 3, Dist::normal(0.0, 1.0));
    AttentionParams p = block.attn;
    p.kind = AttentionKind::ScaledDot;
    Tensor a = scaled_dot_attention(x, p);
    p.kind = AttentionKind::Linear;
    Tensor b = linear_attention(x, p);
    double err = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        err = std::max(err, std::abs(static_cast<double>(a.data[i]) - b.data[i]));
    }
    return expect(err < 1e-6, "T=1 mismatch " + std::to_string(err));
}

std::string check_flow_bijectivity() {
    ModelConfig cfg = ModelConfig::micro();
    WeightStore store = init_weights(cfg, 17);
    auto flow = load_flow(cfg, float_source(store));
    Tensor z = rng_fill({12, cfg.latent_dim}, 19, Dist::normal(0.0, 1.0));
    auto fwd = flow_forward(z, static_cast<const std::vector<float>*>(nullptr), flow);
    if (fwd.log_det != 0.0f) return "log_det not exactly zero";
    Tensor back = flow_inverse(fwd.z, static_cast<const std::vector<float>*>(nullptr), flow);
    double err = 0.0;
    for (size_t i = 0; i < z.data.size(); ++i) {
        err = std::max(err, std::abs(static_cast<double>(z.data[i]) - back.data[i]));
    }
    return expect(err < 1e-5, "roundtrip err " + std::to_string(err));
}

std::string check_loss_composites() {
    LossReportT<double> r = total_losses(1.0, 1.0, 1.0, 2.0, 0.5, 3.0);
    if (r.l_cvae != 1.0 + 45.0 * 1.0 + 10.0 * 1.0) return "cvae composite";
    if (r.l_g != 2.0 + 2.0 * 3.0 + r.l_cvae) return "generator composite";
    if (r.l_d != 0.5) return "discriminator composite";
    return "";
}

std::string check_adv_optimum() {
    DiscOutput real_out, fake_out;
    Tensor ones({2, 3});
    for (float& v : ones.data) v = 1.0f;
    Tensor zeros({2, 3});
    real_out.scores.push_back(ones);
    fake_out.scores.push_back(zeros);
    auto [g, d] = adv_losses(real_out, fake_out);
    if (d != 0.0f) return "optimum D loss not exactly zero";
    if (std::abs(g - 1.0f) > 1e-7f) return "G loss at optimum";
    return "";
}

std::string check_container_roundtrip() {
    ModelConfig cfg = ModelConfig::micro();
    WeightStore store = init_weights(cfg, 23);
    const std::string path = "/tmp/ppgtts_selftest_weights.bin";
    save_weights(store, path);
    WeightStore loaded = load_weights(path);
    if (loaded.size() != store.size()) return "tensor count changed";
    for (const std::string& name : store.names()) {
        const Tensor& a = store.get(name);
        const Tensor& b = loaded.get(name);
        if (a.shape != b.shape) return "shape changed for " + name;
        for (size_t i = 0; i < a.data.size(); ++i) {
            if (a.data[i] != b.data[i]) return "payload changed for " + name;
        }
    }
    std::remove(path.c_str());
    return "";
}

std::string check_wav_roundtrip() {
    Waveform wave;
    wave.samples = rng_fill({4000}, 31, Dist::uniform(-0.9, 0.9)).data;
    const std::string path = "/tmp/ppgtts_selftest_audio.wav";
    write_wav(wave, path);
    Waveform back = read_wav(path);
    if (back.samples.size() != wave.samples.size()) return "length changed";
    for (size_t i = 0; i < wave.samples.size(); ++i) {
        if (std::abs(back.samples[i] - wave.samples[i]) > 1.0f / 32768.0f) {
            return "quantization error too large";
        }
    }
    std::remove(path.c_str());
    return "";
}

std::string check_complexity_runtime_match() {
    ModelConfig cfg = ModelConfig::micro();
    WeightStore store = init_weights(cfg, 41);
    auto src = float_source(store);
    const int frames = 10;

    auto flow = load_flow(cfg, src);
    Tensor z = rng_fill({frames, cfg.latent_dim}, 43, Dist::normal(0.0, 1.0));
    macs::reset();
    flow_forward(z, static_cast<const std::vector<float>*>(nullptr), flow);
    const uint64_t got = macs::count();
    const uint64_t want = cost::flow_macs(cfg, frames);
    if (got != want) {
        return "flow macs runtime " + std::to_string(got) + " != analytic " + std::to_string(want);
    }
    auto dec = load_decoder(cfg, src);
    std::vector<float> spk(cfg.speaker_dim, 0.1f);
    macs::reset();
    decode(z, spk, dec, cfg.stft());
    const uint64_t got_dec = macs::count();
    const uint64_t want_dec = cost::istft_decoder_macs(cfg, frames);
    if (got_dec != want_dec) {
        return "decoder macs runtime " + std::to_string(got_dec) + " != analytic " +
               std::to_string(want_dec);
    }
    return "";
}

std::string check_t2p_frame_count() {
    ModelConfig cfg = ModelConfig::micro();
    WeightStore store = init_weights(cfg, 53);
    auto w = load_text2ppg(cfg, float_source(store));
    PhonemeSequence seq{{1, 2, 3, 4, 5}};
    auto out = text2ppg_forward(seq, w);
    long long total = 0;
    for (int d : out.durations) total += d;
    return expect(out.ppg.dim(0) == total, "frame count != duration sum");
}

}  // namespace

std::vector<SelftestResult> run_selftests(const std::string& filter) {
    const std::vector<Check> checks = {
        {"rng.determinism", check_rng_determinism},
        {"rng.normal_moments", check_rng_moments},
        {"conv.linearity", check_conv_linearity},
        {"dual.polynomial", check_dual_polynomial},
        {"stft.cola", check_cola},
        {"stft.roundtrip", check_stft_roundtrip},
        {"attention.t1_equivalence", check_attention_t1},
        {"flow.bijectivity", check_flow_bijectivity},
        {"losses.composites", check_loss_composites},
        {"losses.adv_optimum", check_adv_optimum},
        {"container.roundtrip", check_container_roundtrip},
        {"wav.roundtrip", check_wav_roundtrip},
        {"complexity.runtime_match", check_complexity_runtime_match},
        {"text2ppg.frame_count", check_t2p_frame_count},
    };

    std::vector<SelftestResult> results;
    for (const Check& c : checks) {
        if (!filter.empty() && c.name.find(filter) == std::string::npos) continue;
        SelftestResult r;
        r.name = c.name;
        try {
            r.detail = c.run();
            r.passed = r.detail.empty();
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("exception: ") + e.what();
        }
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace ppgtts
