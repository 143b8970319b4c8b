// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <optional>

#include "ppgtts/ops.hpp"

namespace ppgtts {

enum class AttentionKind { ScaledDot, Linear };

template <class T>
struct AttentionParamsT {
    TensorT<T> wq, wk, wv, wo;  // [D, D]
    TensorT<T> bq, bk, bv, bo;  // [D]
    int n_heads = 2;
    AttentionKind kind = AttentionKind::Linear;
};

using AttentionParams = AttentionParamsT<float>;

namespace detail {

template <class T>
void check_mask(const std::vector<bool>* mask, int t) {
    if (mask && static_cast<int>(mask->size()) != t) {
        throw std::invalid_argument("attention: mask length mismatch");
    }
    if (mask) {
        bool any = false;
        for (bool b : *mask) any = any || b;
        if (!any) throw std::invalid_argument("attention: mask removes all positions");
    }
}

}  // namespace detail

// softmax(Q K^T / sqrt(D/heads)) V per head, heads concatenated, projected by
// W_o. Masked positions get zero attention weight as keys; masked query rows
// carry a zero context vector (bias-only after the output projection).
template <class T>
TensorT<T> scaled_dot_attention(const TensorT<T>& x, const AttentionParamsT<T>& p,
                                const std::vector<bool>* mask = nullptr) {
    const int t = x.dim(0), d = x.dim(1);
    if (d % p.n_heads != 0) throw std::invalid_argument("attention: heads must divide dim");
    detail::check_mask<T>(mask, t);
    const int dh = d / p.n_heads;

    TensorT<T> q = linear(x, p.wq, &p.bq);
    TensorT<T> k = linear(x, p.wk, &p.bk);
    TensorT<T> v = linear(x, p.wv, &p.bv);
    TensorT<T> ctx({t, d});

    using std::exp;
    using std::sqrt;
    const T scale = T(1.0 / std::sqrt(static_cast<double>(dh)));
    std::vector<T> logits(static_cast<size_t>(t));
    for (int h = 0; h < p.n_heads; ++h) {
        const int off = h * dh;
        macs::add(2ull * t * t * dh);  // QK^T and weights*V
        for (int i = 0; i < t; ++i) {
            if (mask && !(*mask)[i]) {
                for (int e = 0; e < dh; ++e) ctx.at(i, off + e) = T(0);
                continue;
            }
            T max_logit = T(-1e30);
            for (int j = 0; j < t; ++j) {
                accum_t<T> dot(0);
                for (int e = 0; e < dh; ++e) {
                    dot += accum_t<T>(q.at(i, off + e)) * accum_t<T>(k.at(j, off + e));
                }
                logits[j] = T(dot) * scale;
                if ((!mask || (*mask)[j]) && logits[j] > max_logit) max_logit = logits[j];
            }
            accum_t<T> denom(0);
            for (int j = 0; j < t; ++j) {
                if (mask && !(*mask)[j]) {
                    logits[j] = T(0);
                    continue;
                }
                logits[j] = exp(logits[j] - max_logit);
                denom += accum_t<T>(logits[j]);
            }
            for (int e = 0; e < dh; ++e) {
                accum_t<T> acc(0);
                for (int j = 0; j < t; ++j) {
                    acc += accum_t<T>(logits[j]) * accum_t<T>(v.at(j, off + e));
                }
                ctx.at(i, off + e) = T(acc / denom);
            }
        }
    }
    return linear(ctx, p.wo, &p.bo);
}

// Non-causal normalized linear attention with feature map phi(u) = elu(u)+1:
// out_i = phi(q_i) (sum_j phi(k_j) v_j^T) / (phi(q_i) . sum_j phi(k_j)).
// The key/value summary is built once, so cost is linear in sequence length.
template <class T>
TensorT<T> linear_attention(const TensorT<T>& x, const AttentionParamsT<T>& p,
                            const std::vector<bool>* mask = nullptr) {
    const int t = x.dim(0), d = x.dim(1);
    if (d % p.n_heads != 0) throw std::invalid_argument("attention: heads must divide dim");
    detail::check_mask<T>(mask, t);
    const int dh = d / p.n_heads;

    TensorT<T> q = linear(x, p.wq, &p.bq);
    TensorT<T> k = linear(x, p.wk, &p.bk);
    TensorT<T> v = linear(x, p.wv, &p.bv);
    TensorT<T> ctx({t, d});

    std::vector<T> kv(static_cast<size_t>(dh) * dh);
    std::vector<T> ksum(static_cast<size_t>(dh));
    for (int h = 0; h < p.n_heads; ++h) {
        const int off = h * dh;
        std::fill(kv.begin(), kv.end(), T(0));
        std::fill(ksum.begin(), ksum.end(), T(0));
        macs::add(static_cast<uint64_t>(t) * dh * dh);  // phi(K)^T V summary
        for (int j = 0; j < t; ++j) {
            if (mask && !(*mask)[j]) continue;
            for (int e = 0; e < dh; ++e) {
                const T fk = elu_plus_one(k.at(j, off + e));
                ksum[e] += fk;
                for (int f = 0; f < dh; ++f) {
                    kv[static_cast<size_t>(e) * dh + f] += fk * v.at(j, off + f);
                }
            }
        }
        macs::add(static_cast<uint64_t>(t) * dh * dh + static_cast<uint64_t>(t) * dh);
        for (int i = 0; i < t; ++i) {
            if (mask && !(*mask)[i]) {
                for (int f = 0; f < dh; ++f) ctx.at(i, off + f) = T(0);
                continue;
            }
            accum_t<T> den(0);
            for (int e = 0; e < dh; ++e) {
                den += accum_t<T>(elu_plus_one(q.at(i, off + e))) * accum_t<T>(ksum[e]);
            }
            for (int f = 0; f < dh; ++f) {
                accum_t<T> num(0);
                for (int e = 0; e < dh; ++e) {
                    num += accum_t<T>(elu_plus_one(q.at(i, off + e))) *
                           accum_t<T>(kv[static_cast<size_t>(e) * dh + f]);
                }
                ctx.at(i, off + f) = T(num / den);
            }
        }
    }
    return linear(ctx, p.wo, &p.bo);
}

template <class T>
TensorT<T> attention(const TensorT<T>& x, const AttentionParamsT<T>& p,
                     const std::vector<bool>* mask = nullptr) {
    return p.kind == AttentionKind::ScaledDot ? scaled_dot_attention(x, p, mask)
                                              : linear_attention(x, p, mask);
}

}  // namespace ppgtts
