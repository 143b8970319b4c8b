// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include "ppgtts/dsp.hpp"
#include "ppgtts/fft_block.hpp"
#include "ppgtts/rng.hpp"
#include "ppgtts/text2ppg.hpp"
#include "ppgtts/wavenet.hpp"
#include "ppgtts/weights.hpp"

namespace ppgtts {

template <class T>
struct GaussianParamsT {
    TensorT<T> mu;         // [N, latent]
    TensorT<T> log_sigma;  // [N, latent]
};

using GaussianParams = GaussianParamsT<float>;

// ------------------------------------------------------------------ loaders

template <class T>
struct PosteriorWeightsT {
    TensorT<T> pre_w, pre_b;  // [H, F, 1]
    WnStackParamsT<T> wn;
    TensorT<T> out_w, out_b;  // [2L, H, 1]
    int latent = 0, bins = 0;
};

template <class T>
struct PriorWeightsT {
    TensorT<T> in_w, in_b;    // [P, ppg_dim]
    TensorT<T> spk_w, spk_b;  // [P, spk_dim]
    std::vector<FftBlockParamsT<T>> blocks;
    TensorT<T> out_w, out_b;  // [2L, P]
    int latent = 0;
};

template <class T>
struct CouplingWeightsT {
    TensorT<T> pre_w, pre_b;  // [fh, latent/2, 1]
    WnStackParamsT<T> wn;
    TensorT<T> post_w, post_b;  // [latent/2, fh, 1]
};

template <class T>
struct FlowWeightsT {
    std::vector<CouplingWeightsT<T>> couplings;  // size 1 when shared
    std::optional<TensorT<T>> fle;               // [n_couplings, fh], shared mode only
    int n_couplings = 0;
    bool shared = true;
    int latent = 0;
};

template <class T>
struct DecoderWeightsT {
    TensorT<T> spk_w, spk_b;  // [latent, spk_dim]
    std::vector<TensorT<T>> stage_w, stage_b;
    std::vector<TensorT<T>> res_w0, res_b0, res_w1, res_b1;
    std::vector<int> stage_groups, res_groups;
    int kernel = 3, res_kernel = 3, latent = 0;
};

template <class T>
struct PpgPredictorWeightsT {
    std::vector<TensorT<T>> conv_w, conv_b;
    TensorT<T> out_w, out_b;  // [ppg_dim, H]
};

template <class T>
WnStackParamsT<T> load_wn(const WeightSource<T>& src, const std::string& prefix, int layers,
                          int hidden, int kernel) {
    WnStackParamsT<T> wn;
    wn.n_layers = layers;
    wn.hidden = hidden;
    wn.kernel = kernel;
    for (int l = 0; l < layers; ++l) {
        const std::string lp = prefix + ".layer" + std::to_string(l);
        wn.in_w.push_back(src.get(lp + ".in.weight", {2 * hidden, hidden, kernel}));
        wn.in_b.push_back(src.get(lp + ".in.bias", {2 * hidden}));
        wn.skip_w.push_back(src.get(lp + ".skip.weight", {hidden, hidden, 1}));
        wn.skip_b.push_back(src.get(lp + ".skip.bias", {hidden}));
    }
    return wn;
}

template <class T>
PosteriorWeightsT<T> load_posterior(const ModelConfig& cfg, const WeightSource<T>& src) {
    PosteriorWeightsT<T> w;
    const int h = cfg.posterior_hidden, f = cfg.spectrum_bins();
    w.latent = cfg.latent_dim;
    w.bins = f;
    w.pre_w = src.get("post.pre.weight", {h, f, 1});
    w.pre_b = src.get("post.pre.bias", {h});
    w.wn = load_wn(src, "post.wn", cfg.posterior_layers, h, cfg.posterior_kernel);
    w.out_w = src.get("post.out.weight", {2 * cfg.latent_dim, h, 1});
    w.out_b = src.get("post.out.bias", {2 * cfg.latent_dim});
    return w;
}

template <class T>
PriorWeightsT<T> load_prior(const ModelConfig& cfg, const WeightSource<T>& src) {
    PriorWeightsT<T> w;
    const int p = cfg.prior_hidden;
    w.latent = cfg.latent_dim;
    w.in_w = src.get("prior.in.weight", {p, cfg.ppg_dim});
    w.in_b = src.get("prior.in.bias", {p});
    w.spk_w = src.get("prior.spk.weight", {p, cfg.speaker_dim});
    w.spk_b = src.get("prior.spk.bias", {p});
    for (int i = 0; i < cfg.prior_blocks; ++i) {
        w.blocks.push_back(load_fft_block(src, "prior.block" + std::to_string(i), p,
                                          cfg.prior_filter, cfg.ff_kernel1, cfg.ff_kernel2,
                                          cfg.prior_heads, cfg.attention_kind));
    }
    w.out_w = src.get("prior.out.weight", {2 * cfg.latent_dim, p});
    w.out_b = src.get("prior.out.bias", {2 * cfg.latent_dim});
    return w;
}

template <class T>
FlowWeightsT<T> load_flow(const ModelConfig& cfg, const WeightSource<T>& src) {
    FlowWeightsT<T> w;
    w.n_couplings = cfg.flow_couplings;
    w.shared = cfg.share_flow;
    w.latent = cfg.latent_dim;
    const int half = cfg.latent_dim / 2, fh = cfg.flow_hidden;
    auto load_coupling = [&](const std::string& prefix) {
        CouplingWeightsT<T> c;
        c.pre_w = src.get(prefix + ".pre.weight", {fh, half, 1});
        c.pre_b = src.get(prefix + ".pre.bias", {fh});
        c.wn = load_wn(src, prefix + ".wn", cfg.flow_layers, fh, cfg.flow_kernel);
        c.post_w = src.get(prefix + ".post.weight", {half, fh, 1});
        c.post_b = src.get(prefix + ".post.bias", {half});
        return c;
    };
    if (cfg.share_flow) {
        w.couplings.push_back(load_coupling("flow.shared"));
        w.fle = src.get("flow.fle", {cfg.flow_couplings, fh});
    } else {
        for (int c = 0; c < cfg.flow_couplings; ++c) {
            w.couplings.push_back(load_coupling("flow.coupling" + std::to_string(c)));
        }
    }
    return w;
}

template <class T>
DecoderWeightsT<T> load_decoder(const ModelConfig& cfg, const WeightSource<T>& src) {
    if (cfg.decoder_kind != DecoderKind::Istft) {
        throw std::invalid_argument("decoder: upsampling_baseline is an analytic cost model only");
    }
    DecoderWeightsT<T> w;
    w.latent = cfg.latent_dim;
    w.kernel = cfg.decoder_kernel;
    w.res_kernel = cfg.decoder_res_kernel;
    w.stage_groups = cfg.decoder_stage_groups;
    w.res_groups = cfg.decoder_res_groups;
    w.spk_w = src.get("dec.spk.weight", {cfg.latent_dim, cfg.speaker_dim});
    w.spk_b = src.get("dec.spk.bias", {cfg.latent_dim});
    int in_ch = cfg.latent_dim;
    for (size_t s = 0; s < cfg.decoder_channels.size(); ++s) {
        const int out_ch = cfg.decoder_channels[s];
        const int g = cfg.decoder_stage_groups[s], gr = cfg.decoder_res_groups[s];
        const std::string sp = "dec.stage" + std::to_string(s);
        w.stage_w.push_back(src.get(sp + ".conv.weight", {out_ch, in_ch / g, cfg.decoder_kernel}));
        w.stage_b.push_back(src.get(sp + ".conv.bias", {out_ch}));
        w.res_w0.push_back(src.get(sp + ".res.conv0.weight", {out_ch, out_ch / gr, cfg.decoder_res_kernel}));
        w.res_b0.push_back(src.get(sp + ".res.conv0.bias", {out_ch}));
        w.res_w1.push_back(src.get(sp + ".res.conv1.weight", {out_ch, out_ch / gr, cfg.decoder_res_kernel}));
        w.res_b1.push_back(src.get(sp + ".res.conv1.bias", {out_ch}));
        in_ch = out_ch;
    }
    return w;
}

template <class T>
PpgPredictorWeightsT<T> load_ppg_predictor(const ModelConfig& cfg, const WeightSource<T>& src) {
    PpgPredictorWeightsT<T> w;
    const int pp = cfg.ppg_predictor_hidden;
    for (int j = 0; j < cfg.ppg_predictor_layers; ++j) {
        const int in = j == 0 ? cfg.latent_dim : pp;
        w.conv_w.push_back(src.get("ppgpred.conv" + std::to_string(j) + ".weight",
                                   {pp, in, cfg.ppg_predictor_kernel}));
        w.conv_b.push_back(src.get("ppgpred.conv" + std::to_string(j) + ".bias", {pp}));
    }
    w.out_w = src.get("ppgpred.out.weight", {cfg.ppg_dim, pp});
    w.out_b = src.get("ppgpred.out.bias", {cfg.ppg_dim});
    return w;
}

template <class T>
std::vector<T> load_speaker_row(const ModelConfig& cfg, const WeightSource<T>& src, int speaker_id) {
    if (speaker_id < 0 || speaker_id >= cfg.num_speakers) {
        throw std::invalid_argument("unknown speaker id: " + std::to_string(speaker_id));
    }
    TensorT<T> table = src.get("spk.table", {cfg.num_speakers, cfg.speaker_dim});
    std::vector<T> row(static_cast<size_t>(cfg.speaker_dim));
    for (int c = 0; c < cfg.speaker_dim; ++c) row[c] = table.at(speaker_id, c);
    return row;
}

// ----------------------------------------------------------------- forwards

template <class T>
struct PosteriorResult {
    TensorT<T> z;  // [N, latent]
    GaussianParamsT<T> post;
};

// 1x1 pre-conv -> WN stack (no speaker conditioning) -> (mu, log_sigma);
// z = mu + sigma * eps, or z = mu when eps is null.
template <class T>
PosteriorResult<T> posterior_encode(const TensorT<T>& linspec, const PosteriorWeightsT<T>& w,
                                    const TensorT<T>* eps) {
    if (linspec.dim(0) != w.bins) {
        throw std::invalid_argument("posterior: expected " + std::to_string(w.bins) + " bins");
    }
    const int n = linspec.dim(1), latent = w.latent;
    TensorT<T> x = conv1d(linspec, w.pre_w, &w.pre_b);
    TensorT<T> skip = wn_stack(x, static_cast<const std::vector<T>*>(nullptr), w.wn);
    TensorT<T> stats = conv1d(skip, w.out_w, &w.out_b);  // [2L, N]

    PosteriorResult<T> out{TensorT<T>({n, latent}),
                           {TensorT<T>({n, latent}), TensorT<T>({n, latent})}};
    if (eps && (eps->dim(0) != n || eps->dim(1) != latent)) {
        throw std::invalid_argument("posterior: eps shape mismatch");
    }
    using std::exp;
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < latent; ++c) {
            const T mu = stats.at(c, i);
            const T ls = stats.at(latent + c, i);
            out.post.mu.at(i, c) = mu;
            out.post.log_sigma.at(i, c) = ls;
            out.z.at(i, c) = eps ? mu + exp(ls) * eps->at(i, c) : mu;
        }
    }
    ensure_finite(out.z, "posterior latent");
    return out;
}

template <class T>
PosteriorResult<T> posterior_encode(const TensorT<T>& linspec, const PosteriorWeightsT<T>& w,
                                    Rng* rng) {
    if (!rng) return posterior_encode(linspec, w, static_cast<const TensorT<T>*>(nullptr));
    TensorT<T> eps({linspec.dim(1), w.latent});
    for (T& e : eps.data) e = T(rng->normal(0.0, 1.0));
    return posterior_encode(linspec, w, &eps);
}

// PPG projection plus broadcast speaker embedding, FFT blocks, Gaussian head.
template <class T>
GaussianParamsT<T> prior_encode(const TensorT<T>& ppg, const std::vector<T>& speaker,
                                const PriorWeightsT<T>& w) {
    if (ppg.dim(1) != w.in_w.dim(1)) throw std::invalid_argument("prior: ppg dim mismatch");
    if (static_cast<int>(speaker.size()) != w.spk_w.dim(1)) {
        throw std::invalid_argument("prior: speaker dim mismatch");
    }
    const int n = ppg.dim(0), latent = w.latent;
    TensorT<T> x = linear(ppg, w.in_w, &w.in_b);  // [N, P]
    std::vector<T> s = matvec(w.spk_w, speaker, &w.spk_b);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < x.dim(1); ++c) x.at(i, c) += s[c];
    }
    for (const auto& block : w.blocks) x = fft_block(x, block);
    TensorT<T> stats = linear(x, w.out_w, &w.out_b);  // [N, 2L]

    GaussianParamsT<T> out{TensorT<T>({n, latent}), TensorT<T>({n, latent})};
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < latent; ++c) {
            out.mu.at(i, c) = stats.at(i, c);
            out.log_sigma.at(i, c) = stats.at(i, latent + c);
        }
    }
    ensure_finite(out.mu, "prior mean");
    ensure_finite(out.log_sigma, "prior log-sigma");
    return out;
}

namespace detail {

// Shift predicted from one half. The coupling's FLE row (shared mode) is the
// global conditioning: added onto the WN input stream, so the shared weights
// realize a different transform per layer index at zero parameter cost.
template <class T>
TensorT<T> coupling_shift(const TensorT<T>& a, const CouplingWeightsT<T>& c,
                          const TensorT<T>* fle, int fle_row) {
    TensorT<T> x = conv1d(a, c.pre_w, &c.pre_b);  // [fh, N]
    if (fle) {
        for (int ch = 0; ch < x.dim(0); ++ch) {
            const T g = fle->at(fle_row, ch);
            for (int i = 0; i < x.dim(1); ++i) x.at(ch, i) += g;
        }
    }
    TensorT<T> skip = wn_stack(x, static_cast<const std::vector<T>*>(nullptr), c.wn);
    return conv1d(skip, c.post_w, &c.post_b);  // [half, N]
}

}  // namespace detail

template <class T>
struct FlowResult {
    TensorT<T> z;  // [N, latent]
    T log_det;     // exactly 0 under mean-only couplings
};

// Mean-only affine couplings; halves swap between layers. g is reserved for
// external conditioning and unused by default (speaker lives in the PPG).
template <class T>
FlowResult<T> flow_forward(const TensorT<T>& z, const std::vector<T>* g,
                           const FlowWeightsT<T>& w) {
    (void)g;
    if (z.dim(1) != w.latent) throw std::invalid_argument("flow: latent dim mismatch");
    const int n = z.dim(0), half = w.latent / 2;
    TensorT<T> a({half, n}), b({half, n});
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < half; ++c) {
            a.at(c, i) = z.at(i, c);
            b.at(c, i) = z.at(i, half + c);
        }
    }
    for (int k = 0; k < w.n_couplings; ++k) {
        const CouplingWeightsT<T>& cw = w.shared ? w.couplings[0] : w.couplings[k];
        const TensorT<T>* fle = w.fle ? &*w.fle : nullptr;
        TensorT<T> m = detail::coupling_shift(a, cw, fle, k);
        for (size_t i = 0; i < b.data.size(); ++i) b.data[i] += m.data[i];
        std::swap(a, b);
    }
    FlowResult<T> out{TensorT<T>({n, w.latent}), T(0)};
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < half; ++c) {
            out.z.at(i, c) = a.at(c, i);
            out.z.at(i, half + c) = b.at(c, i);
        }
    }
    ensure_finite(out.z, "flow output");
    return out;
}

template <class T>
TensorT<T> flow_inverse(const TensorT<T>& fz, const std::vector<T>* g, const FlowWeightsT<T>& w) {
    (void)g;
    if (fz.dim(1) != w.latent) throw std::invalid_argument("flow: latent dim mismatch");
    const int n = fz.dim(0), half = w.latent / 2;
    TensorT<T> a({half, n}), b({half, n});
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < half; ++c) {
            a.at(c, i) = fz.at(i, c);
            b.at(c, i) = fz.at(i, half + c);
        }
    }
    for (int k = w.n_couplings - 1; k >= 0; --k) {
        std::swap(a, b);
        const CouplingWeightsT<T>& cw = w.shared ? w.couplings[0] : w.couplings[k];
        const TensorT<T>* fle = w.fle ? &*w.fle : nullptr;
        TensorT<T> m = detail::coupling_shift(a, cw, fle, k);
        for (size_t i = 0; i < b.data.size(); ++i) b.data[i] -= m.data[i];
    }
    TensorT<T> out({n, w.latent});
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < half; ++c) {
            out.at(i, c) = a.at(c, i);
            out.at(i, half + c) = b.at(c, i);
        }
    }
    ensure_finite(out, "inverse flow output");
    return out;
}

// Frame-wise latent -> predicted PPG.
template <class T>
TensorT<T> ppg_predict(const TensorT<T>& z, const PpgPredictorWeightsT<T>& w) {
    TensorT<T> x = transpose2d(z);  // [L, N]
    for (size_t j = 0; j < w.conv_w.size(); ++j) {
        x = conv1d(x, w.conv_w[j], &w.conv_b[j]);
        for (T& v : x.data) v = relu(v);
    }
    TensorT<T> out = linear(transpose2d(x), w.out_w, &w.out_b);  // [N, ppg_dim]
    ensure_finite(out, "predicted ppg");
    return out;
}

// z + speaker projection -> grouped conv stages with residual blocks ->
// real/imag split -> iSTFT. N frames in, exactly N*hop samples out.
template <class T>
std::vector<T> decode(const TensorT<T>& z, const std::vector<T>& speaker,
                      const DecoderWeightsT<T>& w, const StftConfig& stft_cfg) {
    if (z.dim(1) != w.latent) throw std::invalid_argument("decode: latent dim mismatch");
    const int n = z.dim(0);
    TensorT<T> x = transpose2d(z);  // [L, N]
    std::vector<T> s = matvec(w.spk_w, speaker, &w.spk_b);
    for (int c = 0; c < w.latent; ++c) {
        for (int i = 0; i < n; ++i) x.at(c, i) += s[c];
    }

    const double slope = 0.1;
    for (size_t st = 0; st < w.stage_w.size(); ++st) {
        for (T& v : x.data) v = leaky_relu(v, slope);
        Conv1dOpts opt;
        opt.groups = w.stage_groups[st];
        x = conv1d(x, w.stage_w[st], &w.stage_b[st], opt);
        Conv1dOpts ropt;
        ropt.groups = w.res_groups[st];
        TensorT<T> r = x;
        for (T& v : r.data) v = leaky_relu(v, slope);
        r = conv1d(r, w.res_w0[st], &w.res_b0[st], ropt);
        for (T& v : r.data) v = leaky_relu(v, slope);
        r = conv1d(r, w.res_w1[st], &w.res_b1[st], ropt);
        for (size_t i = 0; i < x.data.size(); ++i) x.data[i] += r.data[i];
    }

    const int bins = stft_cfg.bins();
    if (x.dim(0) != 2 * bins) throw std::invalid_argument("decode: channel/fft mismatch");
    ComplexSpectrumT<T> spec{TensorT<T>({bins, n}), TensorT<T>({bins, n}), stft_cfg};
    for (int b = 0; b < bins; ++b) {
        for (int i = 0; i < n; ++i) {
            spec.real.at(b, i) = x.at(b, i);
            spec.imag.at(b, i) = x.at(bins + b, i);
        }
    }
    std::vector<T> wave = istft(spec, n * stft_cfg.hop);
    for (const T& v : wave) {
        if (!std::isfinite(value_of(v))) throw std::runtime_error("non-finite sample in decode");
    }
    return wave;
}

// prior -> z_p = mu + temperature * sigma * eps -> inverse flow -> decoder.
// Deterministic given (seed, temperature); the eps path is skipped entirely
// at temperature == 0.
inline Waveform synthesize(const Ppg& ppg, int speaker_id, const WeightStore& store,
                           const ModelConfig& cfg, float temperature, uint64_t seed) {
    if (temperature < 0.0f) throw std::invalid_argument("synthesize: temperature must be >= 0");
    WeightSource<float> src = float_source(store);
    PriorWeightsT<float> prior_w = load_prior(cfg, src);
    FlowWeightsT<float> flow_w = load_flow(cfg, src);
    DecoderWeightsT<float> dec_w = load_decoder(cfg, src);
    std::vector<float> speaker = load_speaker_row(cfg, src, speaker_id);

    if (ppg.frames.dim(1) != cfg.ppg_dim) throw std::invalid_argument("synthesize: ppg dim mismatch");
    GaussianParamsT<float> prior = prior_encode(ppg.frames, speaker, prior_w);

    const int n = prior.mu.dim(0), latent = cfg.latent_dim;
    TensorT<float> zp({n, latent});
    if (temperature > 0.0f) {
        Rng rng(seed);
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < latent; ++c) {
                zp.at(i, c) = prior.mu.at(i, c) +
                              temperature * std::exp(prior.log_sigma.at(i, c)) *
                                  static_cast<float>(rng.normal(0.0, 1.0));
            }
        }
    } else {
        zp = prior.mu;
    }

    TensorT<float> z = flow_inverse(zp, static_cast<const std::vector<float>*>(nullptr), flow_w);
    std::vector<float> wave = decode(z, speaker, dec_w, cfg.stft());
    for (float v : wave) {
        if (!std::isfinite(v)) throw std::runtime_error("synthesize: non-finite sample");
    }
    return Waveform{std::move(wave), cfg.sample_rate};
}

}  // namespace ppgtts
