// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include "ppgtts/attention.hpp"

namespace ppgtts {

// Feed-forward transformer block: pre-norm residual attention followed by a
// pre-norm residual two-conv feed-forward (kernel K1 then K2 over time).
template <class T>
struct FftBlockParamsT {
    AttentionParamsT<T> attn;
    TensorT<T> ff_w1, ff_b1;  // [filter, D, K1]
    TensorT<T> ff_w2, ff_b2;  // [D, filter, K2]
    TensorT<T> ln1_gamma, ln1_beta, ln2_gamma, ln2_beta;  // [D]
};

using FftBlockParams = FftBlockParamsT<float>;

template <class T>
TensorT<T> transpose2d(const TensorT<T>& x) {
    TensorT<T> out({x.dim(1), x.dim(0)});
    for (int r = 0; r < x.dim(0); ++r) {
        for (int c = 0; c < x.dim(1); ++c) out.at(c, r) = x.at(r, c);
    }
    return out;
}

template <class T>
TensorT<T> fft_block(const TensorT<T>& x, const FftBlockParamsT<T>& p,
                     const std::vector<bool>* mask = nullptr) {
    const int t = x.dim(0), d = x.dim(1);
    if (p.attn.wq.dim(0) != d) throw std::invalid_argument("fft_block: dim mismatch");

    TensorT<T> h = attention(layer_norm(x, p.ln1_gamma, p.ln1_beta), p.attn, mask);
    TensorT<T> y({t, d});
    for (size_t i = 0; i < y.data.size(); ++i) y.data[i] = x.data[i] + h.data[i];

    TensorT<T> n = layer_norm(y, p.ln2_gamma, p.ln2_beta);
    TensorT<T> ct = transpose2d(n);  // [D, T]
    TensorT<T> f1 = conv1d(ct, p.ff_w1, &p.ff_b1);
    for (T& v : f1.data) v = relu(v);
    TensorT<T> f2 = conv1d(f1, p.ff_w2, &p.ff_b2);
    TensorT<T> ff = transpose2d(f2);  // [T, D]

    for (size_t i = 0; i < y.data.size(); ++i) y.data[i] = y.data[i] + ff.data[i];
    return y;
}

}  // namespace ppgtts
