// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <string>

#include "ppgtts/tensor.hpp"

namespace ppgtts {

// Deterministic splitmix64 stream. The counter-based update plus finalizer is
// fixed here, so identical seeds give bit-identical integer and uniform
// sequences on every platform; normal variates additionally go through libm
// (sqrt/log/sin/cos) and are bit-stable per C library. No platform RNG is
// involved anywhere in the project.
struct Rng {
    uint64_t state = 0;
    bool has_cached_normal = false;
    double cached_normal = 0.0;

    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next_u64() {
        state += 0x9E3779B97F4A7C15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // Box-Muller on the uniform stream; pairs are generated together and the
    // second variate cached, so the consumed stream positions are documented.
    double normal(double mu, double sigma) {
        if (has_cached_normal) {
            has_cached_normal = false;
            return mu + sigma * cached_normal;
        }
        double u1 = 1.0 - next_unit();  // (0, 1], keeps log finite
        double u2 = next_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * 3.14159265358979323846 * u2;
        cached_normal = r * std::sin(a);
        has_cached_normal = true;
        return mu + sigma * r * std::cos(a);
    }
};

struct Dist {
    enum class Kind { Uniform, Normal };
    Kind kind = Kind::Uniform;
    double a = 0.0;  // lo or mu
    double b = 1.0;  // hi or sigma

    static Dist uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
    static Dist normal(double mu, double sigma) { return {Kind::Normal, mu, sigma}; }
};

inline Tensor rng_fill(const std::vector<int>& shape, uint64_t seed, const Dist& dist) {
    if (dist.kind == Dist::Kind::Normal && dist.b < 0.0) {
        throw std::invalid_argument("rng_fill: sigma must be >= 0");
    }
    Tensor out(shape);  // rejects empty shapes and zero dims
    Rng rng(seed);
    for (float& x : out.data) {
        double v = dist.kind == Dist::Kind::Uniform ? rng.uniform(dist.a, dist.b)
                                                    : rng.normal(dist.a, dist.b);
        x = static_cast<float>(v);
    }
    return out;
}

// FNV-1a over the tensor name, mixed with the master seed. Used to derive
// per-tensor sub-seeds during weight initialization.
inline uint64_t tensor_seed(const std::string& name, uint64_t master_seed) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : name) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h ^ (master_seed * 0x9E3779B97F4A7C15ull);
}

}  // namespace ppgtts
