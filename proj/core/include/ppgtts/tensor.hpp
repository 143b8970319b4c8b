// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppgtts/dual.hpp"

namespace ppgtts {

// Dense row-major tensor. Element type is float for everything that touches
// disk or the public model surface; double / Dual<double> instantiations are
// used by the derivative checks.
template <class T>
struct TensorT {
    std::vector<int> shape;
    std::vector<T> data;

    TensorT() = default;
    explicit TensorT(std::vector<int> s) : shape(std::move(s)) {
        data.assign(numel_of(shape), T(0));
    }
    TensorT(std::vector<int> s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {
        if (data.size() != numel_of(shape)) {
            throw std::invalid_argument("tensor: data size does not match shape");
        }
    }

    static size_t numel_of(const std::vector<int>& s) {
        if (s.empty()) throw std::invalid_argument("tensor: empty shape");
        size_t n = 1;
        for (int d : s) {
            if (d < 1) throw std::invalid_argument("tensor: dimension must be >= 1");
            n *= static_cast<size_t>(d);
        }
        return n;
    }

    size_t numel() const { return data.size(); }
    int dim(int i) const { return shape.at(static_cast<size_t>(i)); }
    int ndim() const { return static_cast<int>(shape.size()); }

    // 2-D access: row r, column c
    T& at(int r, int c) { return data[static_cast<size_t>(r) * shape[1] + c]; }
    const T& at(int r, int c) const { return data[static_cast<size_t>(r) * shape[1] + c]; }

    // 3-D access
    T& at(int i, int j, int k) {
        return data[(static_cast<size_t>(i) * shape[1] + j) * shape[2] + k];
    }
    const T& at(int i, int j, int k) const {
        return data[(static_cast<size_t>(i) * shape[1] + j) * shape[2] + k];
    }
};

using Tensor = TensorT<float>;

template <class T>
bool all_finite(const TensorT<T>& t) {
    for (const T& x : t.data) {
        if (!std::isfinite(value_of(x))) return false;
    }
    return true;
}

template <class T>
void ensure_finite(const TensorT<T>& t, const std::string& where) {
    if (!all_finite(t)) throw std::runtime_error("non-finite values in " + where);
}

template <class T>
void ensure_shape(const TensorT<T>& t, const std::vector<int>& expected, const std::string& name) {
    if (t.shape != expected) {
        std::string want, got;
        for (int d : expected) want += std::to_string(d) + ",";
        for (int d : t.shape) got += std::to_string(d) + ",";
        throw std::invalid_argument("shape mismatch for " + name + ": want [" + want + "] got [" + got + "]");
    }
}

// Casts a float tensor into the scalar type of a templated pipeline.
template <class T>
TensorT<T> cast_tensor(const Tensor& src) {
    TensorT<T> out(src.shape);
    for (size_t i = 0; i < src.data.size(); ++i) out.data[i] = T(src.data[i]);
    return out;
}

}  // namespace ppgtts
