// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>

#include "doctest.h"
#include "ppgtts/dsp.hpp"
#include "ppgtts/rng.hpp"

using namespace ppgtts;

namespace {

std::vector<float> random_wave(int len, uint64_t seed, double amp = 0.8) {
    Tensor t = rng_fill({len}, seed, Dist::uniform(-amp, amp));
    return {t.data.begin(), t.data.end()};
}

double rel_l2(const std::vector<float>& a, const std::vector<float>& b) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += a[i] * a[i];
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_SUITE_BEGIN("dsp");

TEST_CASE("stft of silence is zero") {
    std::vector<float> x(16000, 0.0f);
    auto spec = stft(x, StftConfig{});
    for (float v : spec.real.data) CHECK(v == 0.0f);
    for (float v : spec.imag.data) CHECK(v == 0.0f);
}

TEST_CASE("stft rejects empty input") {
    std::vector<float> x;
    CHECK_THROWS(stft(x, StftConfig{}));
}

TEST_CASE("pure 1 kHz sine peaks at bin 64") {
    StftConfig cfg;
    std::vector<float> x(16000);
    for (int t = 0; t < 16000; ++t) {
        x[t] = std::sin(2.0 * M_PI * 1000.0 * t / 16000.0);
    }
    auto mag = linear_spectrogram(x, cfg);
    const int mid = mag.dim(1) / 2;
    int peak = 0;
    for (int b = 1; b < mag.dim(0); ++b) {
        if (mag.at(b, mid) > mag.at(peak, mid)) peak = b;
    }
    // 1000 * 1024 / 16000 = 64
    CHECK(peak == 64);
}

TEST_CASE("stft matches a direct windowed DFT") {
    StftConfig cfg;
    std::vector<float> x = random_wave(4000, 17);
    auto spec = stft(x, cfg);

    const auto window = hann_window<double>(cfg.win_length);
    const int pad = cfg.center_pad();
    const int len = static_cast<int>(x.size());
    // check a few frames at all bins against the O(F * win) direct transform
    for (int k : {0, 3, spec.frames() - 1}) {
        for (int b = 0; b < cfg.bins(); b += 37) {
            double re = 0.0, im = 0.0;
            for (int i = 0; i < cfg.win_length; ++i) {
                const int src = reflect_index(k * cfg.hop - pad + i, len);
                const double v = window[i] * x[src];
                const double ang = -2.0 * M_PI * b * i / cfg.fft_size;
                re += v * std::cos(ang);
                im += v * std::sin(ang);
            }
            CHECK(std::abs(spec.real.at(b, k) - re) < 1e-4);
            CHECK(std::abs(spec.imag.at(b, k) - im) < 1e-4);
        }
    }
}

TEST_CASE("istft of a zero spectrum is silence") {
    StftConfig cfg;
    ComplexSpectrum spec{Tensor({cfg.bins(), 10}), Tensor({cfg.bins(), 10}), cfg};
    auto y = istft(spec, 2000);
    CHECK(y.size() == 2000);
    for (float v : y) CHECK(v == 0.0f);
}

TEST_CASE("istft(stft(x)) reconstructs x") {
    StftConfig cfg;
    for (uint64_t seed : {1u, 2u, 3u}) {
        std::vector<float> x = random_wave(16000, seed);
        auto y = istft(stft(x, cfg), static_cast<int>(x.size()));
        REQUIRE(y.size() == x.size());
        CHECK(rel_l2(x, y) < 1e-6);
    }
}

TEST_CASE("single-frame spectrum of a windowed impulse inverts to the impulse") {
    StftConfig cfg;
    const int pos = cfg.center_pad();  // frame 0 is centered at sample 0
    const float amp = 0.8f;
    const auto window = hann_window<double>(cfg.win_length);

    ComplexSpectrum spec{Tensor({cfg.bins(), 1}), Tensor({cfg.bins(), 1}), cfg};
    const double wv = amp * window[pos];
    for (int b = 0; b < cfg.bins(); ++b) {
        const double ang = -2.0 * M_PI * b * pos / cfg.fft_size;
        spec.real.at(b, 0) = static_cast<float>(wv * std::cos(ang));
        spec.imag.at(b, 0) = static_cast<float>(wv * std::sin(ang));
    }
    auto y = istft(spec, cfg.hop);
    REQUIRE(y.size() == static_cast<size_t>(cfg.hop));
    CHECK(std::abs(y[0] - amp) < 1e-5);
    for (size_t i = 1; i < y.size(); ++i) CHECK(std::abs(y[i]) < 1e-5);
}

TEST_CASE("istft validates the bin count") {
    StftConfig cfg;
    ComplexSpectrum bad{Tensor({100, 4}), Tensor({100, 4}), cfg};
    CHECK_THROWS(istft(bad));
}

TEST_CASE("stft is linear") {
    StftConfig cfg;
    std::vector<float> x = random_wave(4000, 5);
    std::vector<float> y = random_wave(4000, 6);
    const float a = 2.5f;
    std::vector<float> mix(x.size());
    for (size_t i = 0; i < x.size(); ++i) mix[i] = a * x[i] + y[i];
    auto sm = stft(mix, cfg);
    auto sx = stft(x, cfg);
    auto sy = stft(y, cfg);
    double scale = 1.0;
    for (float v : sm.real.data) scale = std::max(scale, std::abs(static_cast<double>(v)));
    for (size_t i = 0; i < sm.real.data.size(); ++i) {
        CHECK(std::abs(sm.real.data[i] - (a * sx.real.data[i] + sy.real.data[i])) < 1e-5 * scale);
        CHECK(std::abs(sm.imag.data[i] - (a * sx.imag.data[i] + sy.imag.data[i])) < 1e-5 * scale);
    }
}

TEST_CASE("linear_spectrogram equals |stft| and is nonnegative") {
    StftConfig cfg;
    std::vector<float> x = random_wave(3000, 7);
    auto spec = stft(x, cfg);
    auto mag = linear_spectrogram(x, cfg);
    for (size_t i = 0; i < mag.data.size(); ++i) {
        const double m = std::sqrt(static_cast<double>(spec.real.data[i]) * spec.real.data[i] +
                                   static_cast<double>(spec.imag.data[i]) * spec.imag.data[i]);
        CHECK(std::abs(mag.data[i] - m) < 1e-6 * (1.0 + m));
        CHECK(mag.data[i] >= 0.0f);
    }
}

TEST_CASE("framewise Parseval identity holds within 1%") {
    StftConfig cfg;
    std::vector<float> x = random_wave(8000, 8);
    auto spec = stft(x, cfg);
    const auto window = hann_window<double>(cfg.win_length);
    const int pad = cfg.center_pad();
    const int len = static_cast<int>(x.size());

    for (int k : {2, 10, 20}) {
        double spectral = 0.0;
        for (int b = 0; b < cfg.bins(); ++b) {
            const double m2 = static_cast<double>(spec.real.at(b, k)) * spec.real.at(b, k) +
                              static_cast<double>(spec.imag.at(b, k)) * spec.imag.at(b, k);
            const bool interior = b != 0 && b != cfg.bins() - 1;
            spectral += interior ? 2.0 * m2 : m2;  // hermitian half -> full spectrum
        }
        double time_energy = 0.0;
        for (int i = 0; i < cfg.win_length; ++i) {
            const double v = window[i] * x[reflect_index(k * cfg.hop - pad + i, len)];
            time_energy += v * v;
        }
        CHECK(spectral == doctest::Approx(cfg.fft_size * time_energy).epsilon(0.01));
    }
}

TEST_CASE("mel of silence sits at the log floor") {
    StftConfig cfg;
    MelConfig mel;
    std::vector<float> x(16000, 0.0f);
    auto m = mel_spectrogram(x, cfg, mel, 16000);
    CHECK(m.dim(0) == 80);
    const float floor_log = std::log(1e-5f);
    for (float v : m.data) CHECK(v == doctest::Approx(floor_log));
}

TEST_CASE("filterbank applied to an all-ones magnitude gives row sums") {
    StftConfig cfg;
    MelConfig mel;
    const auto fb = mel_filterbank(cfg, mel, 16000);
    const int f = cfg.bins();
    for (int m = 0; m < mel.n_mels; m += 13) {
        double row_sum = 0.0;
        double applied = 0.0;
        for (int b = 0; b < f; ++b) {
            row_sum += fb[static_cast<size_t>(m) * f + b];
            applied += fb[static_cast<size_t>(m) * f + b] * 1.0;
        }
        CHECK(applied == doctest::Approx(row_sum));
        CHECK(row_sum > 0.0);
    }
}

TEST_CASE("filterbank rows are nonnegative and cover the band interior") {
    StftConfig cfg;
    MelConfig mel;
    const auto fb = mel_filterbank(cfg, mel, 16000);
    const int f = cfg.bins();
    for (double v : fb) CHECK(v >= 0.0);
    for (int b = 0; b < f; ++b) {
        const double hz = static_cast<double>(b) * 16000 / cfg.fft_size;
        if (hz <= mel.f_min || hz >= mel.f_max) continue;
        double cover = 0.0;
        for (int m = 0; m < mel.n_mels; ++m) cover += fb[static_cast<size_t>(m) * f + b];
        CHECK(cover > 0.0);
    }
}

TEST_CASE("white noise lifts every mel channel above the floor") {
    StftConfig cfg;
    MelConfig mel;
    std::vector<float> x = random_wave(16000, 912, 0.9);
    auto m = mel_spectrogram(x, cfg, mel, 16000);
    const float floor_log = std::log(1e-5f);
    for (float v : m.data) CHECK(v > floor_log);
}

TEST_CASE("squared Hann overlap-add is constant for the 800/200 pair") {
    CHECK(cola_deviation(StftConfig{}) < 1e-6);
}

TEST_CASE("one second at 16 kHz with hop 200 gives 80 frames (+1 boundary frame)") {
    CHECK(stft_frames(16000, StftConfig{}) == 81);  // centered framing adds one edge frame
    const int natural = (stft_frames(16000, StftConfig{}) - 1) * 200;
    CHECK(natural == 16000);
}

TEST_CASE("stft config validation") {
    StftConfig bad{1000, 200, 800};  // not a power of two
    CHECK_THROWS(bad.validate());
    StftConfig bad2{1024, 900, 800};  // hop > win
    CHECK_THROWS(bad2.validate());
}

TEST_SUITE_END();
