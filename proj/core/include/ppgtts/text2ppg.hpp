// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include "ppgtts/fft_block.hpp"
#include "ppgtts/weights.hpp"

namespace ppgtts {

struct PhonemeSequence {
    std::vector<int> ids;
};

// Frame-level 256-dim linguistic features at the hop rate. Carries no speaker
// or acoustic information; a function of the phoneme ids and weights only.
struct Ppg {
    Tensor frames;  // [N, ppg_dim]
};

template <class T>
struct Text2PpgWeightsT {
    TensorT<T> embedding;  // [vocab, D]
    std::vector<FftBlockParamsT<T>> blocks;
    std::vector<TensorT<T>> dur_w, dur_b;          // conv [D, D, K]
    std::vector<TensorT<T>> dur_ln_g, dur_ln_b;    // [D]
    TensorT<T> dur_proj_w, dur_proj_b;             // [1, D]
    std::vector<TensorT<T>> post_w, post_b;        // postnet convs
    TensorT<T> out_w, out_b;                       // [ppg_dim, D]
    int hidden = 0, vocab = 0, ppg_dim = 0;
};

using Text2PpgWeights = Text2PpgWeightsT<float>;

template <class T>
FftBlockParamsT<T> load_fft_block(const WeightSource<T>& src, const std::string& prefix, int d,
                                  int filter, int k1, int k2, int heads, AttentionKind kind) {
    FftBlockParamsT<T> p;
    p.attn.wq = src.get(prefix + ".attn.wq", {d, d});
    p.attn.wk = src.get(prefix + ".attn.wk", {d, d});
    p.attn.wv = src.get(prefix + ".attn.wv", {d, d});
    p.attn.wo = src.get(prefix + ".attn.wo", {d, d});
    p.attn.bq = src.get(prefix + ".attn.bq", {d});
    p.attn.bk = src.get(prefix + ".attn.bk", {d});
    p.attn.bv = src.get(prefix + ".attn.bv", {d});
    p.attn.bo = src.get(prefix + ".attn.bo", {d});
    p.attn.n_heads = heads;
    p.attn.kind = kind;
    p.ln1_gamma = src.get(prefix + ".ln1.gamma", {d});
    p.ln1_beta = src.get(prefix + ".ln1.beta", {d});
    p.ff_w1 = src.get(prefix + ".ff.conv1.weight", {filter, d, k1});
    p.ff_b1 = src.get(prefix + ".ff.conv1.bias", {filter});
    p.ff_w2 = src.get(prefix + ".ff.conv2.weight", {d, filter, k2});
    p.ff_b2 = src.get(prefix + ".ff.conv2.bias", {d});
    p.ln2_gamma = src.get(prefix + ".ln2.gamma", {d});
    p.ln2_beta = src.get(prefix + ".ln2.beta", {d});
    return p;
}

template <class T>
Text2PpgWeightsT<T> load_text2ppg(const ModelConfig& cfg, const WeightSource<T>& src) {
    Text2PpgWeightsT<T> w;
    const int d = cfg.text2ppg_hidden;
    w.hidden = d;
    w.vocab = cfg.vocab_size;
    w.ppg_dim = cfg.ppg_dim;
    w.embedding = src.get("t2p.embedding", {cfg.vocab_size, d});
    for (int i = 0; i < cfg.text2ppg_blocks; ++i) {
        w.blocks.push_back(load_fft_block(src, "t2p.block" + std::to_string(i), d,
                                          cfg.text2ppg_filter, cfg.ff_kernel1, cfg.ff_kernel2,
                                          cfg.text2ppg_heads, cfg.attention_kind));
    }
    for (int j = 0; j < cfg.duration_layers; ++j) {
        const std::string jp = std::to_string(j);
        w.dur_w.push_back(src.get("t2p.duration.conv" + jp + ".weight", {d, d, cfg.duration_kernel}));
        w.dur_b.push_back(src.get("t2p.duration.conv" + jp + ".bias", {d}));
        w.dur_ln_g.push_back(src.get("t2p.duration.ln" + jp + ".gamma", {d}));
        w.dur_ln_b.push_back(src.get("t2p.duration.ln" + jp + ".beta", {d}));
    }
    w.dur_proj_w = src.get("t2p.duration.proj.weight", {1, d});
    w.dur_proj_b = src.get("t2p.duration.proj.bias", {1});
    const int pch = cfg.postnet_channels;
    for (int j = 0; j < cfg.postnet_layers; ++j) {
        const int in = j == 0 ? d : pch;
        const int out = j == cfg.postnet_layers - 1 ? d : pch;
        w.post_w.push_back(src.get("t2p.postnet.conv" + std::to_string(j) + ".weight",
                                   {out, in, cfg.postnet_kernel}));
        w.post_b.push_back(src.get("t2p.postnet.conv" + std::to_string(j) + ".bias", {out}));
    }
    w.out_w = src.get("t2p.out.weight", {cfg.ppg_dim, d});
    w.out_b = src.get("t2p.out.bias", {cfg.ppg_dim});
    return w;
}

// PE[pos, 2i] = sin(pos / 10000^(2i/D)), PE[pos, 2i+1] = cos(same).
template <class T>
TensorT<T> sinusoidal_positions(int length, int dim) {
    TensorT<T> pe({length, dim});
    for (int pos = 0; pos < length; ++pos) {
        for (int i = 0; i < dim; i += 2) {
            const double angle = pos / std::pow(10000.0, static_cast<double>(i) / dim);
            pe.at(pos, i) = T(std::sin(angle));
            if (i + 1 < dim) pe.at(pos, i + 1) = T(std::cos(angle));
        }
    }
    return pe;
}

// Row i repeated durations[i] times, order preserved.
template <class T>
TensorT<T> length_regulate(const TensorT<T>& h, const std::vector<int>& durations) {
    if (static_cast<int>(durations.size()) != h.dim(0)) {
        throw std::invalid_argument("length_regulate: durations size mismatch");
    }
    long long total = 0;
    for (int d : durations) {
        if (d < 0) throw std::invalid_argument("length_regulate: negative duration");
        total += d;
    }
    if (total < 1) throw std::invalid_argument("length_regulate: all durations are zero");
    const int dim = h.dim(1);
    TensorT<T> out({static_cast<int>(total), dim});
    int row = 0;
    for (int i = 0; i < h.dim(0); ++i) {
        for (int r = 0; r < durations[i]; ++r) {
            for (int c = 0; c < dim; ++c) out.at(row, c) = h.at(i, c);
            ++row;
        }
    }
    return out;
}

// Per-token log-duration, exponentiated, rounded half-up, clamped to >= 1.
template <class T>
std::vector<int> predict_durations(const TensorT<T>& h, const Text2PpgWeightsT<T>& w) {
    TensorT<T> x = h;  // [T, D]
    for (size_t j = 0; j < w.dur_w.size(); ++j) {
        TensorT<T> c = transpose2d(x);
        c = conv1d(c, w.dur_w[j], &w.dur_b[j]);
        for (T& v : c.data) v = relu(v);
        x = layer_norm(transpose2d(c), w.dur_ln_g[j], w.dur_ln_b[j]);
    }
    TensorT<T> logd = linear(x, w.dur_proj_w, &w.dur_proj_b);  // [T, 1]
    std::vector<int> out(static_cast<size_t>(h.dim(0)));
    for (int i = 0; i < h.dim(0); ++i) {
        const double d = std::exp(value_of(logd.at(i, 0)));
        out[i] = std::max(1, static_cast<int>(std::floor(d + 0.5)));
    }
    return out;
}

template <class T>
struct Text2PpgResult {
    TensorT<T> ppg;  // [N, ppg_dim]
    std::vector<int> durations;
};

// embedding + positions -> FFT blocks -> durations -> length regulation ->
// residual postnet -> projection to the PPG dimension. No RNG anywhere.
template <class T>
Text2PpgResult<T> text2ppg_forward(const PhonemeSequence& seq, const Text2PpgWeightsT<T>& w,
                                   const std::vector<int>* durations_override = nullptr) {
    if (seq.ids.empty()) throw std::invalid_argument("text2ppg: empty phoneme sequence");
    for (int id : seq.ids) {
        if (id < 0 || id >= w.vocab) {
            throw std::invalid_argument("text2ppg: phoneme id out of range: " + std::to_string(id));
        }
    }
    const int t = static_cast<int>(seq.ids.size());
    const int d = w.hidden;

    TensorT<T> h({t, d});
    TensorT<T> pe = sinusoidal_positions<T>(t, d);
    for (int i = 0; i < t; ++i) {
        for (int c = 0; c < d; ++c) h.at(i, c) = w.embedding.at(seq.ids[i], c) + pe.at(i, c);
    }
    for (const auto& block : w.blocks) h = fft_block(h, block);

    std::vector<int> durations =
        durations_override ? *durations_override : predict_durations(h, w);
    TensorT<T> frames = length_regulate(h, durations);  // [N, D]

    // postnet: tanh on all but the last conv, residual over the D-dim stream
    TensorT<T> x = transpose2d(frames);  // [D, N]
    for (size_t j = 0; j < w.post_w.size(); ++j) {
        x = conv1d(x, w.post_w[j], &w.post_b[j]);
        if (j + 1 < w.post_w.size()) {
            for (T& v : x.data) v = tanh_act(v);
        }
    }
    TensorT<T> refined = transpose2d(x);
    for (size_t i = 0; i < refined.data.size(); ++i) refined.data[i] += frames.data[i];

    Text2PpgResult<T> out{linear(refined, w.out_w, &w.out_b), std::move(durations)};
    ensure_finite(out.ppg, "text2ppg output");
    return out;
}

}  // namespace ppgtts
