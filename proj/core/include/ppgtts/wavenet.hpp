// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <optional>

#include "ppgtts/ops.hpp"

namespace ppgtts {

// Gated residual stack. Each layer: a dilation-1 conv to 2H channels, a
// tanh (x) sigmoid gate, and one 1x1 conv whose output serves both as the
// residual update and the skip contribution. The stack returns the skip sum.
//
// Optional global conditioning: cond_proj ([n_layers*2H, G], no bias) maps a
// conditioning vector to per-layer gate offsets. No bias keeps cond=none and
// cond=zero-vector exactly equivalent.
template <class T>
struct WnStackParamsT {
    int n_layers = 0;
    int hidden = 0;
    int kernel = 0;
    std::vector<TensorT<T>> in_w;    // [2H, H, K] each
    std::vector<TensorT<T>> in_b;    // [2H]
    std::vector<TensorT<T>> skip_w;  // [H, H, 1]
    std::vector<TensorT<T>> skip_b;  // [H]
    std::optional<TensorT<T>> cond_proj;  // [n_layers*2H, G]
};

using WnStackParams = WnStackParamsT<float>;

template <class T>
TensorT<T> wn_stack(const TensorT<T>& x, const std::vector<T>* cond,
                    const WnStackParamsT<T>& p) {
    const int h = x.dim(0), t = x.dim(1);
    if (h != p.hidden) throw std::invalid_argument("wn_stack: hidden dim mismatch");

    std::vector<T> gates;
    if (cond) {
        if (!p.cond_proj) throw std::invalid_argument("wn_stack: conditioning given without cond_proj");
        if (p.cond_proj->dim(1) != static_cast<int>(cond->size())) {
            throw std::invalid_argument("wn_stack: conditioning dim mismatch");
        }
        gates = matvec(*p.cond_proj, *cond, nullptr);  // [n_layers*2H]
    }

    TensorT<T> cur = x;
    TensorT<T> skip_sum({h, t});
    TensorT<T> acts({h, t});
    for (int l = 0; l < p.n_layers; ++l) {
        TensorT<T> z = conv1d(cur, p.in_w[l], &p.in_b[l]);
        if (cond) {
            for (int c = 0; c < 2 * h; ++c) {
                const T g = gates[static_cast<size_t>(l) * 2 * h + c];
                for (int i = 0; i < t; ++i) z.at(c, i) += g;
            }
        }
        for (int c = 0; c < h; ++c) {
            for (int i = 0; i < t; ++i) {
                acts.at(c, i) = tanh_act(z.at(c, i)) * sigmoid(z.at(h + c, i));
            }
        }
        TensorT<T> r = conv1d(acts, p.skip_w[l], &p.skip_b[l]);
        for (size_t i = 0; i < r.data.size(); ++i) {
            cur.data[i] += r.data[i];
            skip_sum.data[i] += r.data[i];
        }
    }
    return skip_sum;
}

}  // namespace ppgtts
