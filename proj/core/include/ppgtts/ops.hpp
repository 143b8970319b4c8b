// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <optional>
#include <type_traits>
#include <utility>

#include "ppgtts/macs.hpp"
#include "ppgtts/tensor.hpp"

namespace ppgtts {

// ---------------------------------------------------------------- activations

template <class T> T relu(const T& x) { return x > T(0) ? x : T(0); }

template <class T> T leaky_relu(const T& x, double slope) {
    return x > T(0) ? x : T(slope) * x;
}

template <class T> T sigmoid(const T& x) {
    using std::exp;
    return T(1) / (T(1) + exp(-x));
}

// elu(x) + 1: strictly positive, C1-continuous. Feature map of linear attention.
template <class T> T elu_plus_one(const T& x) {
    using std::exp;
    return x > T(0) ? x + T(1) : exp(x);
}

template <class T> T tanh_act(const T& x) {
    using std::tanh;
    return tanh(x);
}

// ------------------------------------------------------------------- conv1d

struct Conv1dOpts {
    int stride = 1;
    int dilation = 1;
    int groups = 1;
    bool same_padding = true;  // symmetric zero padding of (K-1)*dilation/2 per side
    int pad_left = 0;          // used when same_padding == false
    int pad_right = 0;
};

inline std::pair<int, int> conv1d_same_padding(int kernel, int dilation) {
    int total = (kernel - 1) * dilation;
    return {total / 2, total - total / 2};
}

inline int conv1d_out_len(int len, int kernel, const Conv1dOpts& opt) {
    auto [pl, pr] = opt.same_padding ? conv1d_same_padding(kernel, opt.dilation)
                                     : std::pair<int, int>{opt.pad_left, opt.pad_right};
    int padded = len + pl + pr;
    int span = (kernel - 1) * opt.dilation + 1;
    if (span > padded) throw std::invalid_argument("conv1d: kernel larger than padded input");
    return (padded - span) / opt.stride + 1;
}

// x: [C_in, T], w: [C_out, C_in/groups, K], bias: [C_out] or empty.
template <class T>
TensorT<T> conv1d(const TensorT<T>& x, const TensorT<T>& w,
                  const std::type_identity_t<TensorT<T>>* bias,
                  const Conv1dOpts& opt = {}) {
    if (x.ndim() != 2 || w.ndim() != 3) throw std::invalid_argument("conv1d: bad ranks");
    const int c_in = x.dim(0), len = x.dim(1);
    const int c_out = w.dim(0), k = w.dim(2);
    if (opt.groups < 1 || c_in % opt.groups != 0 || c_out % opt.groups != 0) {
        throw std::invalid_argument("conv1d: channels not divisible by groups");
    }
    const int cpg_in = c_in / opt.groups;
    const int cpg_out = c_out / opt.groups;
    if (w.dim(1) != cpg_in) throw std::invalid_argument("conv1d: weight in-channel mismatch");
    if (bias && bias->numel() != static_cast<size_t>(c_out)) {
        throw std::invalid_argument("conv1d: bias size mismatch");
    }

    const int pl = opt.same_padding ? conv1d_same_padding(k, opt.dilation).first : opt.pad_left;
    const int t_out = conv1d_out_len(len, k, opt);

    TensorT<T> out({c_out, t_out});
    macs::add(static_cast<uint64_t>(t_out) * c_out * cpg_in * k);
    for (int co = 0; co < c_out; ++co) {
        const int g = co / cpg_out;
        const T* wrow = &w.data[static_cast<size_t>(co) * cpg_in * k];
        for (int t = 0; t < t_out; ++t) {
            accum_t<T> acc(0);
            const int t0 = t * opt.stride - pl;
            for (int ci = 0; ci < cpg_in; ++ci) {
                const T* xin = &x.data[static_cast<size_t>(g * cpg_in + ci) * len];
                for (int kk = 0; kk < k; ++kk) {
                    const int ti = t0 + kk * opt.dilation;
                    T v = (ti >= 0 && ti < len) ? xin[ti] : T(0);
                    acc += accum_t<T>(v) * accum_t<T>(wrow[ci * k + kk]);
                }
            }
            if (bias) acc += accum_t<T>(bias->data[co]);
            out.at(co, t) = T(acc);
        }
    }
    return out;
}

// ------------------------------------------------------------------- conv2d

struct Conv2dOpts {
    int stride_h = 1;
    int stride_w = 1;
    int pad_h = 0;
    int pad_w = 0;
};

inline int conv2d_out_len(int len, int kernel, int stride, int pad) {
    int padded = len + 2 * pad;
    if (kernel > padded) throw std::invalid_argument("conv2d: kernel larger than padded input");
    return (padded - kernel) / stride + 1;
}

// x: [C_in, H, W], w: [C_out, C_in, Kh, Kw], bias: [C_out] or null.
template <class T>
TensorT<T> conv2d(const TensorT<T>& x, const TensorT<T>& w,
                  const std::type_identity_t<TensorT<T>>* bias,
                  const Conv2dOpts& opt = {}) {
    if (x.ndim() != 3 || w.ndim() != 4) throw std::invalid_argument("conv2d: bad ranks");
    const int c_in = x.dim(0), h = x.dim(1), wd = x.dim(2);
    const int c_out = w.dim(0), kh = w.dim(2), kw = w.dim(3);
    if (w.dim(1) != c_in) throw std::invalid_argument("conv2d: weight in-channel mismatch");
    const int h_out = conv2d_out_len(h, kh, opt.stride_h, opt.pad_h);
    const int w_out = conv2d_out_len(wd, kw, opt.stride_w, opt.pad_w);

    TensorT<T> out({c_out, h_out, w_out});
    macs::add(static_cast<uint64_t>(h_out) * w_out * c_out * c_in * kh * kw);
    for (int co = 0; co < c_out; ++co) {
        for (int oy = 0; oy < h_out; ++oy) {
            const int y0 = oy * opt.stride_h - opt.pad_h;
            for (int ox = 0; ox < w_out; ++ox) {
                const int x0 = ox * opt.stride_w - opt.pad_w;
                accum_t<T> acc(0);
                for (int ci = 0; ci < c_in; ++ci) {
                    for (int ky = 0; ky < kh; ++ky) {
                        const int yi = y0 + ky;
                        for (int kx = 0; kx < kw; ++kx) {
                            const int xi = x0 + kx;
                            T v = (yi >= 0 && yi < h && xi >= 0 && xi < wd) ? x.at(ci, yi, xi) : T(0);
                            acc += accum_t<T>(v) * accum_t<T>(w.data[((static_cast<size_t>(co) * c_in + ci) * kh + ky) * kw + kx]);
                        }
                    }
                }
                if (bias) acc += accum_t<T>(bias->data[co]);
                out.at(co, oy, ox) = T(acc);
            }
        }
    }
    return out;
}

// ----------------------------------------------------------- linear / matvec

// x: [T, in], w: [out, in], bias: [out] or null -> [T, out]
template <class T>
TensorT<T> linear(const TensorT<T>& x, const TensorT<T>& w,
                  const std::type_identity_t<TensorT<T>>* bias) {
    if (x.ndim() != 2 || w.ndim() != 2 || x.dim(1) != w.dim(1)) {
        throw std::invalid_argument("linear: dimension mismatch");
    }
    const int rows = x.dim(0), in = x.dim(1), out_dim = w.dim(0);
    TensorT<T> out({rows, out_dim});
    macs::add(static_cast<uint64_t>(rows) * in * out_dim);
    for (int r = 0; r < rows; ++r) {
        for (int o = 0; o < out_dim; ++o) {
            accum_t<T> acc(0);
            for (int i = 0; i < in; ++i) acc += accum_t<T>(x.at(r, i)) * accum_t<T>(w.at(o, i));
            if (bias) acc += accum_t<T>(bias->data[o]);
            out.at(r, o) = T(acc);
        }
    }
    return out;
}

// w: [out, in], v: [in] -> [out]
template <class T>
std::vector<T> matvec(const TensorT<T>& w, const std::vector<T>& v,
                      const std::type_identity_t<TensorT<T>>* bias) {
    if (w.ndim() != 2 || static_cast<size_t>(w.dim(1)) != v.size()) {
        throw std::invalid_argument("matvec: dimension mismatch");
    }
    const int out_dim = w.dim(0), in = w.dim(1);
    std::vector<T> out(static_cast<size_t>(out_dim));
    macs::add(static_cast<uint64_t>(out_dim) * in);
    for (int o = 0; o < out_dim; ++o) {
        accum_t<T> acc(0);
        for (int i = 0; i < in; ++i) acc += accum_t<T>(w.at(o, i)) * accum_t<T>(v[i]);
        if (bias) acc += accum_t<T>(bias->data[o]);
        out[o] = T(acc);
    }
    return out;
}

// --------------------------------------------------------------- layer_norm

// x: [T, D] (or [D]); per-position mean 0 / variance 1 over the last axis,
// then the elementwise affine.
template <class T>
TensorT<T> layer_norm(const TensorT<T>& x, const TensorT<T>& gamma, const TensorT<T>& beta,
                      double eps = 1e-5) {
    const int d = x.dim(x.ndim() - 1);
    if (gamma.numel() != static_cast<size_t>(d) || beta.numel() != static_cast<size_t>(d)) {
        throw std::invalid_argument("layer_norm: affine size mismatch");
    }
    if (eps <= 0.0) throw std::invalid_argument("layer_norm: eps must be > 0");
    const size_t rows = x.numel() / static_cast<size_t>(d);
    TensorT<T> out(x.shape);
    using std::sqrt;
    for (size_t r = 0; r < rows; ++r) {
        const T* row = &x.data[r * d];
        T* orow = &out.data[r * d];
        accum_t<T> mean(0);
        for (int i = 0; i < d; ++i) mean += accum_t<T>(row[i]);
        mean = mean / accum_t<T>(static_cast<double>(d));
        accum_t<T> var(0);
        for (int i = 0; i < d; ++i) {
            accum_t<T> c = accum_t<T>(row[i]) - mean;
            var += c * c;
        }
        var = var / accum_t<T>(static_cast<double>(d));
        accum_t<T> inv = accum_t<T>(1) / sqrt(var + accum_t<T>(eps));
        for (int i = 0; i < d; ++i) {
            accum_t<T> n = (accum_t<T>(row[i]) - mean) * inv;
            orow[i] = T(n * accum_t<T>(gamma.data[i]) + accum_t<T>(beta.data[i]));
        }
    }
    return out;
}

}  // namespace ppgtts
