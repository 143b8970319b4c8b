// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include "ppgtts/complex_conv.hpp"
#include "ppgtts/dsp.hpp"
#include "ppgtts/weights.hpp"

namespace ppgtts {

struct DiscResolution {
    int fft_size, hop, win_length;
};

inline std::vector<DiscResolution> disc_resolutions(const ModelConfig& cfg) {
    std::vector<DiscResolution> out;
    for (size_t r = 0; r < cfg.disc_fft_sizes.size(); ++r) {
        out.push_back({cfg.disc_fft_sizes[r], cfg.disc_hops[r], cfg.disc_wins[r]});
    }
    return out;
}

// Discriminator STFT framing: no center padding, frames from sample 0. Keeps
// the magnitude representation exactly invariant to whole-hop time shifts.
inline int disc_frames(int len, const DiscResolution& res) {
    if (len < res.win_length) throw std::invalid_argument("discriminator: input shorter than window");
    return (len - res.win_length) / res.hop + 1;
}

template <class T>
ComplexSpectrumT<T> disc_stft(const std::vector<T>& x, const DiscResolution& res) {
    const int n_frames = disc_frames(static_cast<int>(x.size()), res);
    const int f = res.fft_size / 2 + 1;
    const std::vector<T> window = hann_window<T>(res.win_length);
    StftConfig cfg{res.fft_size, res.hop, res.win_length};
    ComplexSpectrumT<T> spec{TensorT<T>({f, n_frames}), TensorT<T>({f, n_frames}), cfg};
    std::vector<T> frame(static_cast<size_t>(res.win_length));
    for (int k = 0; k < n_frames; ++k) {
        const int start = k * res.hop;
        for (int i = 0; i < res.win_length; ++i) frame[i] = x[start + i] * window[i];
        auto bins = rfft(frame, res.fft_size);
        for (int b = 0; b < f; ++b) {
            spec.real.at(b, k) = bins[b].re;
            spec.imag.at(b, k) = bins[b].im;
        }
    }
    return spec;
}

// scores: one 2-D map per sub-discriminator. features: every post-activation
// conv output, in layer order per sub-discriminator (complex layers push the
// real and imaginary parts as two entries).
template <class T>
struct DiscOutputT {
    std::vector<TensorT<T>> scores;
    std::vector<TensorT<T>> features;
};

using DiscOutput = DiscOutputT<float>;

template <class T>
struct MsdWeightsT {
    // [resolution][layer]
    std::vector<std::vector<TensorT<T>>> conv_w, conv_b;
    std::vector<TensorT<T>> out_w, out_b;
    std::vector<DiscResolution> resolutions;
    int kernel = 3;
    double slope = 0.2;
};

template <class T>
struct McdWeightsT {
    std::vector<std::vector<ComplexKernelT<T>>> convs;
    std::vector<ComplexKernelT<T>> out;
    std::vector<DiscResolution> resolutions;
    int kernel = 3;
    double slope = 0.2;
};

template <class T>
MsdWeightsT<T> load_msd(const ModelConfig& cfg, const WeightSource<T>& src) {
    MsdWeightsT<T> w;
    w.resolutions = disc_resolutions(cfg);
    w.kernel = cfg.disc_kernel;
    w.slope = cfg.disc_lrelu_slope;
    for (size_t r = 0; r < w.resolutions.size(); ++r) {
        const std::string rp = "msd.res" + std::to_string(r);
        std::vector<TensorT<T>> cw, cb;
        int in_ch = 1;
        for (size_t l = 0; l < cfg.disc_channels.size(); ++l) {
            const int out_ch = cfg.disc_channels[l];
            cw.push_back(src.get(rp + ".conv" + std::to_string(l) + ".weight",
                                 {out_ch, in_ch, cfg.disc_kernel, cfg.disc_kernel}));
            cb.push_back(src.get(rp + ".conv" + std::to_string(l) + ".bias", {out_ch}));
            in_ch = out_ch;
        }
        w.conv_w.push_back(std::move(cw));
        w.conv_b.push_back(std::move(cb));
        w.out_w.push_back(src.get(rp + ".out.weight", {1, in_ch, 1, 1}));
        w.out_b.push_back(src.get(rp + ".out.bias", {1}));
    }
    return w;
}

template <class T>
McdWeightsT<T> load_mcd(const ModelConfig& cfg, const WeightSource<T>& src) {
    McdWeightsT<T> w;
    w.resolutions = disc_resolutions(cfg);
    w.kernel = cfg.disc_kernel;
    w.slope = cfg.disc_lrelu_slope;
    for (size_t r = 0; r < w.resolutions.size(); ++r) {
        const std::string rp = "mcd.res" + std::to_string(r);
        std::vector<ComplexKernelT<T>> layers;
        int in_ch = 1;
        for (size_t l = 0; l < cfg.disc_channels.size(); ++l) {
            const int out_ch = cfg.disc_channels[l];
            const std::string lp = rp + ".conv" + std::to_string(l);
            ComplexKernelT<T> k;
            k.w_re = src.get(lp + ".wre", {out_ch, in_ch, cfg.disc_kernel, cfg.disc_kernel});
            k.w_im = src.get(lp + ".wim", {out_ch, in_ch, cfg.disc_kernel, cfg.disc_kernel});
            k.b_re = src.get(lp + ".bre", {out_ch});
            k.b_im = src.get(lp + ".bim", {out_ch});
            layers.push_back(std::move(k));
            in_ch = out_ch;
        }
        w.convs.push_back(std::move(layers));
        ComplexKernelT<T> o;
        o.w_re = src.get(rp + ".out.wre", {1, in_ch, 1, 1});
        o.w_im = src.get(rp + ".out.wim", {1, in_ch, 1, 1});
        o.b_re = src.get(rp + ".out.bre", {1});
        o.b_im = src.get(rp + ".out.bim", {1});
        w.out.push_back(std::move(o));
    }
    return w;
}

inline Conv2dOpts disc_conv_opts(int kernel, size_t layer) {
    Conv2dOpts opt;
    opt.pad_h = (kernel - 1) / 2;
    opt.pad_w = (kernel - 1) / 2;
    opt.stride_h = 1;
    opt.stride_w = layer == 0 ? 1 : 2;  // stride 2 in time on the middle layers
    return opt;
}

// Per resolution: magnitude STFT -> strided leaky-ReLU conv stack -> 1x1 score.
template <class T>
DiscOutputT<T> msd_forward(const std::vector<T>& wave, const MsdWeightsT<T>& w) {
    DiscOutputT<T> out;
    for (size_t r = 0; r < w.resolutions.size(); ++r) {
        TensorT<T> mag = magnitude(disc_stft(wave, w.resolutions[r]));
        TensorT<T> x({1, mag.dim(0), mag.dim(1)});
        x.data = mag.data;
        for (size_t l = 0; l < w.conv_w[r].size(); ++l) {
            x = conv2d(x, w.conv_w[r][l], &w.conv_b[r][l], disc_conv_opts(w.kernel, l));
            for (T& v : x.data) v = leaky_relu(v, w.slope);
            out.features.push_back(x);
        }
        TensorT<T> score = conv2d(x, w.out_w[r], &w.out_b[r]);
        out.scores.push_back(TensorT<T>({score.dim(1), score.dim(2)}, std::move(score.data)));
    }
    return out;
}

// Complex stack on the real/imag STFT pair; leaky-ReLU acts on the parts
// separately; the final score is the magnitude of the complex score map.
template <class T>
DiscOutputT<T> mcd_forward(const std::vector<T>& wave, const McdWeightsT<T>& w) {
    using std::sqrt;
    DiscOutputT<T> out;
    for (size_t r = 0; r < w.resolutions.size(); ++r) {
        ComplexSpectrumT<T> spec = disc_stft(wave, w.resolutions[r]);
        TensorT<T> re({1, spec.real.dim(0), spec.real.dim(1)});
        TensorT<T> im({1, spec.imag.dim(0), spec.imag.dim(1)});
        re.data = spec.real.data;
        im.data = spec.imag.data;
        for (size_t l = 0; l < w.convs[r].size(); ++l) {
            auto [nre, nim] = complex_conv2d(re, im, w.convs[r][l], disc_conv_opts(w.kernel, l));
            re = std::move(nre);
            im = std::move(nim);
            for (T& v : re.data) v = leaky_relu(v, w.slope);
            for (T& v : im.data) v = leaky_relu(v, w.slope);
            out.features.push_back(re);
            out.features.push_back(im);
        }
        auto [sre, sim] = complex_conv2d(re, im, w.out[r]);
        TensorT<T> score({sre.dim(1), sre.dim(2)});
        for (size_t i = 0; i < score.data.size(); ++i) {
            T m2 = sre.data[i] * sre.data[i] + sim.data[i] * sim.data[i];
            score.data[i] = m2 > T(0) ? sqrt(m2) : T(0);
        }
        out.scores.push_back(std::move(score));
    }
    return out;
}

// MSD + MCD concatenated, the layout consumed by the adversarial and
// feature-matching losses.
template <class T>
DiscOutputT<T> disc_forward_all(const std::vector<T>& wave, const MsdWeightsT<T>& msd,
                                const McdWeightsT<T>& mcd) {
    DiscOutputT<T> a = msd_forward(wave, msd);
    DiscOutputT<T> b = mcd_forward(wave, mcd);
    for (auto& s : b.scores) a.scores.push_back(std::move(s));
    for (auto& f : b.features) a.features.push_back(std::move(f));
    return a;
}

}  // namespace ppgtts
