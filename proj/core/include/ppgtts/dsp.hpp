// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <algorithm>
#include <cmath>

#include "ppgtts/fft.hpp"
#include "ppgtts/tensor.hpp"

namespace ppgtts {

struct Waveform {
    std::vector<float> samples;
    int sample_rate = 16000;
};

// hop 200 / win 800 at 16 kHz: 12.5 ms hop, 50 ms window. fft_size is the
// smallest power of two holding the window; the decoder's final channel
// count is tied to it (2 * (fft_size/2 + 1)).
struct StftConfig {
    int fft_size = 1024;
    int hop = 200;
    int win_length = 800;

    int bins() const { return fft_size / 2 + 1; }
    int center_pad() const { return win_length / 2; }

    void validate() const {
        if (!(hop >= 1 && hop <= win_length && win_length <= fft_size)) {
            throw std::invalid_argument("stft: need 1 <= hop <= win_length <= fft_size");
        }
        if (!is_power_of_two(fft_size)) {
            throw std::invalid_argument("stft: fft_size must be a power of two");
        }
    }
};

template <class T>
struct ComplexSpectrumT {
    TensorT<T> real;  // [F, N]
    TensorT<T> imag;  // [F, N]
    StftConfig config;

    int bins() const { return real.dim(0); }
    int frames() const { return real.dim(1); }
};

using ComplexSpectrum = ComplexSpectrumT<float>;

// Periodic Hann. With win=800/hop=200 the squared-window overlap-add sum is
// the exact constant 3/2 on interior samples.
template <class T>
std::vector<T> hann_window(int length) {
    std::vector<T> w(static_cast<size_t>(length));
    for (int i = 0; i < length; ++i) {
        w[i] = T(0.5 - 0.5 * std::cos(2.0 * 3.14159265358979323846 * i / length));
    }
    return w;
}

inline int stft_frames(int len, const StftConfig& cfg) {
    const int padded = len + 2 * cfg.center_pad();
    return (padded - cfg.win_length) / cfg.hop + 1;
}

// Reflect index into [0, len), folding as often as needed.
inline int reflect_index(int i, int len) {
    if (len == 1) return 0;
    while (i < 0 || i >= len) {
        if (i < 0) i = -i;
        if (i >= len) i = 2 * (len - 1) - i;
    }
    return i;
}

// Center-padded (reflect) analysis. Frame k is centered at sample k*hop.
template <class T>
ComplexSpectrumT<T> stft(const std::vector<T>& x, const StftConfig& cfg) {
    cfg.validate();
    const int len = static_cast<int>(x.size());
    if (len < 1) throw std::invalid_argument("stft: empty input");

    const int pad = cfg.center_pad();
    const int n_frames = stft_frames(len, cfg);
    const int f = cfg.bins();
    const std::vector<T> window = hann_window<T>(cfg.win_length);

    ComplexSpectrumT<T> spec{TensorT<T>({f, n_frames}), TensorT<T>({f, n_frames}), cfg};
    std::vector<T> frame(static_cast<size_t>(cfg.win_length));
    for (int k = 0; k < n_frames; ++k) {
        const int start = k * cfg.hop - pad;
        for (int i = 0; i < cfg.win_length; ++i) {
            frame[i] = x[reflect_index(start + i, len)] * window[i];
        }
        auto bins = rfft(frame, cfg.fft_size);
        for (int b = 0; b < f; ++b) {
            spec.real.at(b, k) = bins[b].re;
            spec.imag.at(b, k) = bins[b].im;
        }
    }
    return spec;
}

// Overlap-add synthesis with the same Hann window and exact per-sample
// squared-window normalization. target_len < 0 picks the natural centered
// length (N-1)*hop; the decoder asks for N*hop.
template <class T>
std::vector<T> istft(const ComplexSpectrumT<T>& spec, int target_len = -1) {
    const StftConfig& cfg = spec.config;
    cfg.validate();
    if (spec.real.dim(0) != cfg.bins() || spec.imag.shape != spec.real.shape) {
        throw std::invalid_argument("istft: bin count inconsistent with fft_size");
    }
    const int n_frames = spec.frames();
    const int pad = cfg.center_pad();
    const int ola_len = (n_frames - 1) * cfg.hop + cfg.win_length;
    const int out_len = target_len >= 0 ? target_len : (n_frames - 1) * cfg.hop;

    const std::vector<T> window = hann_window<T>(cfg.win_length);
    std::vector<T> ola(static_cast<size_t>(ola_len), T(0));
    std::vector<double> norm(static_cast<size_t>(ola_len), 0.0);
    const std::vector<double> window_d = hann_window<double>(cfg.win_length);

    std::vector<Cpx<T>> bins(static_cast<size_t>(cfg.bins()));
    for (int k = 0; k < n_frames; ++k) {
        for (int b = 0; b < cfg.bins(); ++b) bins[b] = {spec.real.at(b, k), spec.imag.at(b, k)};
        std::vector<T> frame = irfft(bins, cfg.fft_size);
        const int start = k * cfg.hop;
        for (int i = 0; i < cfg.win_length; ++i) {
            ola[start + i] += frame[i] * window[i];
            norm[start + i] += window_d[i] * window_d[i];
        }
    }

    std::vector<T> out(static_cast<size_t>(out_len), T(0));
    for (int t = 0; t < out_len; ++t) {
        const int p = t + pad;
        if (p < ola_len && norm[p] > 1e-10) out[t] = ola[p] * T(1.0 / norm[p]);
    }
    return out;
}

// |stft|: sqrt(re^2 + im^2), [F, N].
template <class T>
TensorT<T> magnitude(const ComplexSpectrumT<T>& spec) {
    TensorT<T> mag(spec.real.shape);
    using std::sqrt;
    for (size_t i = 0; i < mag.data.size(); ++i) {
        T m2 = spec.real.data[i] * spec.real.data[i] + spec.imag.data[i] * spec.imag.data[i];
        mag.data[i] = m2 > T(0) ? sqrt(m2) : T(0);
    }
    return mag;
}

template <class T>
TensorT<T> linear_spectrogram(const std::vector<T>& x, const StftConfig& cfg) {
    return magnitude(stft(x, cfg));
}

struct MelConfig {
    int n_mels = 80;
    double f_min = 0.0;
    double f_max = 8000.0;
    double log_floor = 1e-5;
};

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// HTK-scale triangular filters, peak-normalized. Row-major [n_mels, F].
inline std::vector<double> mel_filterbank(const StftConfig& cfg, const MelConfig& mel,
                                          int sample_rate) {
    const int f = cfg.bins();
    std::vector<double> fb(static_cast<size_t>(mel.n_mels) * f, 0.0);
    const double mel_lo = hz_to_mel(mel.f_min);
    const double mel_hi = hz_to_mel(mel.f_max);
    std::vector<double> edges(static_cast<size_t>(mel.n_mels) + 2);
    for (int m = 0; m < mel.n_mels + 2; ++m) {
        edges[m] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * m / (mel.n_mels + 1));
    }
    for (int m = 0; m < mel.n_mels; ++m) {
        const double fl = edges[m], fc = edges[m + 1], fr = edges[m + 2];
        for (int b = 0; b < f; ++b) {
            const double hz = static_cast<double>(b) * sample_rate / cfg.fft_size;
            double w = 0.0;
            if (hz > fl && hz < fr) {
                w = hz <= fc ? (hz - fl) / (fc - fl) : (fr - hz) / (fr - fc);
            }
            fb[static_cast<size_t>(m) * f + b] = w;
        }
    }
    return fb;
}

// log-compressed mel of the magnitude spectrum; clamped at log_floor before log.
template <class T>
TensorT<T> mel_spectrogram(const std::vector<T>& x, const StftConfig& cfg, const MelConfig& mel,
                           int sample_rate) {
    TensorT<T> mag = linear_spectrogram(x, cfg);
    const int f = cfg.bins(), n = mag.dim(1);
    const std::vector<double> fb = mel_filterbank(cfg, mel, sample_rate);
    TensorT<T> out({mel.n_mels, n});
    using std::log;
    const T floor_v = T(mel.log_floor);
    for (int m = 0; m < mel.n_mels; ++m) {
        for (int t = 0; t < n; ++t) {
            accum_t<T> acc(0);
            for (int b = 0; b < f; ++b) {
                const double w = fb[static_cast<size_t>(m) * f + b];
                if (w != 0.0) acc += accum_t<T>(w) * accum_t<T>(mag.at(b, t));
            }
            T v = T(acc);
            out.at(m, t) = log(v > floor_v ? v : floor_v);
        }
    }
    return out;
}

// Max relative deviation of the overlapped squared-window sum from its
// interior mean. < 1e-6 for the Hann 800/200 pair.
inline double cola_deviation(const StftConfig& cfg) {
    const auto w = hann_window<double>(cfg.win_length);
    const int reach = (cfg.win_length / cfg.hop + 2) * cfg.hop;
    std::vector<double> acc(static_cast<size_t>(reach + cfg.win_length), 0.0);
    for (int start = 0; start <= reach; start += cfg.hop) {
        for (int i = 0; i < cfg.win_length; ++i) acc[start + i] += w[i] * w[i];
    }
    // interior: fully-overlapped region
    const int lo = cfg.win_length, hi = reach;
    double mean = 0.0;
    for (int t = lo; t < hi; ++t) mean += acc[t];
    mean /= (hi - lo);
    double dev = 0.0;
    for (int t = lo; t < hi; ++t) dev = std::max(dev, std::abs(acc[t] - mean) / mean);
    return dev;
}

}  // namespace ppgtts
