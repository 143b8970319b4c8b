// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include "ppgtts/ops.hpp"

namespace ppgtts {

template <class T>
struct ComplexKernelT {
    TensorT<T> w_re, w_im;  // [C_out, C_in, Kh, Kw]
    TensorT<T> b_re, b_im;  // [C_out]
};

using ComplexKernel = ComplexKernelT<float>;

// (x_re + i x_im) * (w_re + i w_im) expanded into four real convolutions:
// re = x_re*w_re - x_im*w_im, im = x_re*w_im + x_im*w_re, plus complex bias.
template <class T>
std::pair<TensorT<T>, TensorT<T>> complex_conv2d(const TensorT<T>& x_re, const TensorT<T>& x_im,
                                                 const ComplexKernelT<T>& k,
                                                 const Conv2dOpts& opt = {}) {
    if (x_re.shape != x_im.shape) throw std::invalid_argument("complex_conv2d: re/im shape mismatch");
    if (k.w_re.shape != k.w_im.shape) throw std::invalid_argument("complex_conv2d: kernel re/im shape mismatch");

    TensorT<T> rr = conv2d(x_re, k.w_re, nullptr, opt);
    TensorT<T> ii = conv2d(x_im, k.w_im, nullptr, opt);
    TensorT<T> ri = conv2d(x_re, k.w_im, nullptr, opt);
    TensorT<T> ir = conv2d(x_im, k.w_re, nullptr, opt);

    const int c_out = rr.dim(0);
    const size_t plane = rr.data.size() / static_cast<size_t>(c_out);
    TensorT<T> out_re(rr.shape), out_im(rr.shape);
    for (int c = 0; c < c_out; ++c) {
        for (size_t i = 0; i < plane; ++i) {
            const size_t idx = static_cast<size_t>(c) * plane + i;
            out_re.data[idx] = rr.data[idx] - ii.data[idx] + k.b_re.data[c];
            out_im.data[idx] = ri.data[idx] + ir.data[idx] + k.b_im.data[c];
        }
    }
    return {std::move(out_re), std::move(out_im)};
}

}  // namespace ppgtts
