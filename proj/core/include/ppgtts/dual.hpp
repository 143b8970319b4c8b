// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <type_traits>

namespace ppgtts {

// Forward-mode dual number: value v and directional tangent t.
// (a, a')*(b, b') = (a*b, a*b' + a'*b); unary ops apply the chain rule.
template <class R>
struct Dual {
    R v{};
    R t{};

    constexpr Dual() = default;
    template <class A, class = std::enable_if_t<std::is_arithmetic_v<A>>>
    constexpr Dual(A value) : v(static_cast<R>(value)) {}
    constexpr Dual(R value, R tangent) : v(value), t(tangent) {}

    Dual& operator+=(const Dual& o) { v += o.v; t += o.t; return *this; }
    Dual& operator-=(const Dual& o) { v -= o.v; t -= o.t; return *this; }
    Dual& operator*=(const Dual& o) { t = v * o.t + t * o.v; v *= o.v; return *this; }
    Dual& operator/=(const Dual& o) { t = (t * o.v - v * o.t) / (o.v * o.v); v /= o.v; return *this; }
};

template <class R> Dual<R> operator+(Dual<R> a, const Dual<R>& b) { return a += b; }
template <class R> Dual<R> operator-(Dual<R> a, const Dual<R>& b) { return a -= b; }
template <class R> Dual<R> operator*(Dual<R> a, const Dual<R>& b) { return a *= b; }
template <class R> Dual<R> operator/(Dual<R> a, const Dual<R>& b) { return a /= b; }
template <class R> Dual<R> operator-(const Dual<R>& a) { return Dual<R>(-a.v, -a.t); }

template <class R> bool operator<(const Dual<R>& a, const Dual<R>& b) { return a.v < b.v; }
template <class R> bool operator>(const Dual<R>& a, const Dual<R>& b) { return a.v > b.v; }
template <class R> bool operator<=(const Dual<R>& a, const Dual<R>& b) { return a.v <= b.v; }
template <class R> bool operator>=(const Dual<R>& a, const Dual<R>& b) { return a.v >= b.v; }

template <class R> Dual<R> exp(const Dual<R>& x) { R e = std::exp(x.v); return {e, e * x.t}; }
template <class R> Dual<R> log(const Dual<R>& x) { return {std::log(x.v), x.t / x.v}; }
template <class R> Dual<R> sqrt(const Dual<R>& x) { R s = std::sqrt(x.v); return {s, x.t / (R(2) * s)}; }
template <class R> Dual<R> tanh(const Dual<R>& x) { R th = std::tanh(x.v); return {th, (R(1) - th * th) * x.t}; }
template <class R> Dual<R> sin(const Dual<R>& x) { return {std::sin(x.v), std::cos(x.v) * x.t}; }
template <class R> Dual<R> cos(const Dual<R>& x) { return {std::cos(x.v), -std::sin(x.v) * x.t}; }
template <class R> Dual<R> abs(const Dual<R>& x) { return x.v >= R(0) ? x : -x; }

// value_of: scalar value as double, for shape/limit checks and reporting.
inline double value_of(float x) { return static_cast<double>(x); }
inline double value_of(double x) { return x; }
template <class R> double value_of(const Dual<R>& x) { return static_cast<double>(x.v); }

// Accumulator type: float sums are carried in double, everything else in itself.
template <class T> struct accum { using type = T; };
template <> struct accum<float> { using type = double; };
template <class T> using accum_t = typename accum<T>::type;

}  // namespace ppgtts
