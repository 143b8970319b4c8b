// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ppgtts {

template <class T>
struct Cpx {
    T re{};
    T im{};
};

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey. Twiddle factors are evaluated in double and
// cast into T, so float and dual instantiations follow the same tables.
template <class T>
void fft_radix2(std::vector<Cpx<T>>& a, bool inverse) {
    const int n = static_cast<int>(a.size());
    if (!is_power_of_two(n)) throw std::invalid_argument("fft: size must be a power of two");

    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    for (int len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * 3.14159265358979323846 / len;
        const int half = len / 2;
        std::vector<double> wre(half), wim(half);
        for (int k = 0; k < half; ++k) {
            wre[k] = std::cos(ang * k);
            wim[k] = std::sin(ang * k);
        }
        for (int i = 0; i < n; i += len) {
            for (int j = 0; j < half; ++j) {
                const T wr = T(wre[j]), wi = T(wim[j]);
                Cpx<T> u = a[i + j];
                Cpx<T> v = a[i + j + half];
                Cpx<T> t{v.re * wr - v.im * wi, v.re * wi + v.im * wr};
                a[i + j] = {u.re + t.re, u.im + t.im};
                a[i + j + half] = {u.re - t.re, u.im - t.im};
            }
        }
    }
    if (inverse) {
        const T inv_n = T(1.0 / n);
        for (auto& c : a) {
            c.re = c.re * inv_n;
            c.im = c.im * inv_n;
        }
    }
}

// Real FFT of n samples -> n/2 + 1 bins.
template <class T>
std::vector<Cpx<T>> rfft(const std::vector<T>& x, int n) {
    std::vector<Cpx<T>> buf(static_cast<size_t>(n));
    const int m = std::min<int>(n, static_cast<int>(x.size()));
    for (int i = 0; i < m; ++i) buf[i] = {x[i], T(0)};
    fft_radix2(buf, false);
    buf.resize(static_cast<size_t>(n / 2 + 1));
    return buf;
}

// Inverse real FFT of n/2 + 1 bins -> n samples (hermitian expansion).
template <class T>
std::vector<T> irfft(const std::vector<Cpx<T>>& half, int n) {
    if (static_cast<int>(half.size()) != n / 2 + 1) {
        throw std::invalid_argument("irfft: bin count does not match fft size");
    }
    std::vector<Cpx<T>> buf(static_cast<size_t>(n));
    for (int k = 0; k <= n / 2; ++k) buf[k] = half[k];
    for (int k = n / 2 + 1; k < n; ++k) {
        const Cpx<T>& c = half[n - k];
        buf[k] = {c.re, -c.im};
    }
    fft_radix2(buf, true);
    std::vector<T> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) out[i] = buf[i].re;
    return out;
}

}  // namespace ppgtts
