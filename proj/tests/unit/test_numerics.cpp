// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>

#include "doctest.h"
#include "ppgtts/ops.hpp"
#include "ppgtts/rng.hpp"

using namespace ppgtts;

TEST_SUITE_BEGIN("numerics");

TEST_CASE("rng_fill degenerate uniform interval gives zeros") {
    Tensor t = rng_fill({4}, 7, Dist::uniform(0.0, 0.0));
    for (float v : t.data) CHECK(v == 0.0f);
}

TEST_CASE("rng_fill is bit-deterministic per (shape, seed, dist)") {
    Tensor a = rng_fill({128}, 42, Dist::normal(1.0, 2.0));
    Tensor b = rng_fill({128}, 42, Dist::normal(1.0, 2.0));
    CHECK(a.data == b.data);
    Tensor c = rng_fill({128}, 43, Dist::normal(1.0, 2.0));
    bool any_diff = false;
    for (size_t i = 0; i < c.data.size(); ++i) any_diff |= (a.data[i] != c.data[i]);
    CHECK(any_diff);
}

TEST_CASE("rng_fill normal moments match the law of large numbers") {
    Tensor t = rng_fill({100000}, 99, Dist::normal(0.0, 1.0));
    double mean = 0.0;
    for (float v : t.data) mean += v;
    mean /= static_cast<double>(t.numel());
    double var = 0.0;
    for (float v : t.data) var += (v - mean) * (v - mean);
    var /= static_cast<double>(t.numel());
    // recorded values for seed 99
    CHECK(mean == doctest::Approx(-0.005433636).epsilon(1e-4));
    CHECK(var == doctest::Approx(1.002837891).epsilon(1e-4));
    CHECK(mean > -0.02);
    CHECK(mean < 0.02);
    CHECK(var > 0.95);
    CHECK(var < 1.05);
    // stream head, frozen for the cross-run reproducibility contract
    CHECK(t.data[0] == doctest::Approx(0.763331413).epsilon(1e-6));
    CHECK(t.data[1] == doctest::Approx(0.153870165).epsilon(1e-6));
}

TEST_CASE("rng_fill rejects invalid arguments") {
    CHECK_THROWS(rng_fill({0}, 1, Dist::uniform(0, 1)));
    CHECK_THROWS(rng_fill({}, 1, Dist::uniform(0, 1)));
    CHECK_THROWS(rng_fill({4}, 1, Dist::normal(0.0, -1.0)));
}

TEST_CASE("conv1d identity kernel reproduces the input") {
    Tensor x = rng_fill({1, 9}, 3, Dist::normal(0.0, 1.0));
    Tensor w({1, 1, 1});
    w.data[0] = 1.0f;
    Tensor y = conv1d(x, w, nullptr);
    CHECK(y.shape == x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) CHECK(y.data[i] == doctest::Approx(x.data[i]));
}

TEST_CASE("grouped conv1d equals two independent half convolutions") {
    Tensor x = rng_fill({4, 11}, 5, Dist::normal(0.0, 1.0));
    Tensor w = rng_fill({6, 2, 3}, 6, Dist::normal(0.0, 0.5));
    Conv1dOpts opt;
    opt.groups = 2;
    Tensor y = conv1d(x, w, nullptr, opt);

    // split into the two group convolutions
    for (int g = 0; g < 2; ++g) {
        Tensor xg({2, 11});
        for (int c = 0; c < 2; ++c) {
            for (int t = 0; t < 11; ++t) xg.at(c, t) = x.at(g * 2 + c, t);
        }
        Tensor wg({3, 2, 3});
        for (int co = 0; co < 3; ++co) {
            for (int ci = 0; ci < 2; ++ci) {
                for (int k = 0; k < 3; ++k) wg.at(co, ci, k) = w.at(g * 3 + co, ci, k);
            }
        }
        Tensor yg = conv1d(xg, wg, nullptr);
        for (int co = 0; co < 3; ++co) {
            for (int t = 0; t < 11; ++t) {
                CHECK(y.at(g * 3 + co, t) == doctest::Approx(yg.at(co, t)).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("dilated conv1d matches a naive triple-loop reference") {
    Tensor x = rng_fill({3, 7}, 11, Dist::normal(0.0, 1.0));
    Tensor w = rng_fill({2, 3, 3}, 12, Dist::normal(0.0, 0.7));
    Tensor b = rng_fill({2}, 13, Dist::normal(0.0, 0.1));
    Conv1dOpts opt;
    opt.dilation = 2;
    Tensor y = conv1d(x, w, &b, opt);

    // same padding for K=3, dilation=2: 2 per side
    const int pad = 2;
    for (int co = 0; co < 2; ++co) {
        for (int t = 0; t < 7; ++t) {
            double acc = b.data[co];
            for (int ci = 0; ci < 3; ++ci) {
                for (int k = 0; k < 3; ++k) {
                    const int ti = t - pad + 2 * k;
                    const double v = (ti >= 0 && ti < 7) ? x.at(ci, ti) : 0.0;
                    acc += v * w.at(co, ci, k);
                }
            }
            CHECK(std::abs(y.at(co, t) - acc) < 1e-6);
        }
    }
}

TEST_CASE("conv1d validates groups and kernel size") {
    Tensor x = rng_fill({3, 5}, 1, Dist::normal(0.0, 1.0));
    Tensor w = rng_fill({2, 3, 3}, 2, Dist::normal(0.0, 1.0));
    Conv1dOpts opt;
    opt.groups = 2;  // 3 % 2 != 0
    CHECK_THROWS(conv1d(x, w, nullptr, opt));

    Tensor wide = rng_fill({1, 3, 9}, 3, Dist::normal(0.0, 1.0));
    Conv1dOpts nopad;
    nopad.same_padding = false;
    CHECK_THROWS(conv1d(x, wide, nullptr, nopad));  // kernel larger than unpadded input
}

TEST_CASE("strided conv1d matches the output-length arithmetic and a reference") {
    Tensor x = rng_fill({2, 10}, 41, Dist::normal(0.0, 1.0));
    Tensor w = rng_fill({3, 2, 3}, 42, Dist::normal(0.0, 0.5));
    Conv1dOpts opt;
    opt.stride = 2;
    opt.same_padding = false;
    Tensor y = conv1d(x, w, nullptr, opt);
    REQUIRE(y.dim(1) == (10 - 3) / 2 + 1);
    for (int co = 0; co < 3; ++co) {
        for (int t = 0; t < y.dim(1); ++t) {
            double acc = 0.0;
            for (int ci = 0; ci < 2; ++ci) {
                for (int k = 0; k < 3; ++k) acc += x.at(ci, 2 * t + k) * w.at(co, ci, k);
            }
            CHECK(std::abs(y.at(co, t) - acc) < 1e-6);
        }
    }
}

TEST_CASE("conv1d is linear in its input") {
    Tensor x1 = rng_fill({3, 16}, 21, Dist::normal(0.0, 1.0));
    Tensor x2 = rng_fill({3, 16}, 22, Dist::normal(0.0, 1.0));
    Tensor w = rng_fill({4, 3, 5}, 23, Dist::normal(0.0, 0.5));
    const float a = -2.3f;
    Tensor mix({3, 16});
    for (size_t i = 0; i < mix.data.size(); ++i) mix.data[i] = a * x1.data[i] + x2.data[i];
    Tensor lhs = conv1d(mix, w, nullptr);
    Tensor y1 = conv1d(x1, w, nullptr);
    Tensor y2 = conv1d(x2, w, nullptr);
    for (size_t i = 0; i < lhs.data.size(); ++i) {
        CHECK(std::abs(lhs.data[i] - (a * y1.data[i] + y2.data[i])) < 1e-5);
    }
}

TEST_CASE("layer_norm collapses constant rows to beta") {
    Tensor x({2, 4});
    for (int c = 0; c < 4; ++c) {
        x.at(0, c) = 3.5f;
        x.at(1, c) = -1.25f;
    }
    Tensor gamma({4}), beta({4});
    for (int c = 0; c < 4; ++c) {
        gamma.data[c] = 1.0f;
        beta.data[c] = 0.0f;
    }
    Tensor y = layer_norm(x, gamma, beta);
    for (float v : y.data) CHECK(std::abs(v) < 1e-3);

    for (int c = 0; c < 4; ++c) {
        gamma.data[c] = 0.0f;
        beta.data[c] = 7.0f;
    }
    Tensor z = layer_norm(x, gamma, beta);
    for (float v : z.data) CHECK(v == 7.0f);
}

TEST_CASE("layer_norm standardizes random rows before the affine") {
    Tensor x = rng_fill({1, 256}, 31, Dist::normal(3.0, 2.0));
    Tensor gamma({256}), beta({256});
    for (int c = 0; c < 256; ++c) gamma.data[c] = 1.0f;
    Tensor y = layer_norm(x, gamma, beta);
    double mean = 0.0;
    for (float v : y.data) mean += v;
    mean /= 256.0;
    double var = 0.0;
    for (float v : y.data) var += (v - mean) * (v - mean);
    var /= 256.0;
    CHECK(std::abs(mean) < 1e-5);
    CHECK(std::abs(var - 1.0) < 1e-3);

    Tensor bad_gamma({8});
    CHECK_THROWS(layer_norm(x, bad_gamma, beta));
}

TEST_CASE("dual arithmetic matches symbolic derivatives on polynomials") {
    // f(x) = x^4 - 3x^2 + 2x, f'(x) = 4x^3 - 6x + 2
    for (double x0 : {-2.0, -0.5, 0.0, 1.25, 3.0}) {
        Dual<double> x(x0, 1.0);
        Dual<double> f = x * x * x * x - Dual<double>(3) * x * x + Dual<double>(2) * x;
        const double expected = 4 * x0 * x0 * x0 - 6 * x0 + 2;
        CHECK(f.t == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("dual product rule holds exactly") {
    Dual<double> a(1.5, 0.25), b(-2.0, 3.0);
    Dual<double> p = a * b;
    CHECK(p.v == 1.5 * -2.0);
    CHECK(p.t == 1.5 * 3.0 + 0.25 * -2.0);
}

TEST_CASE("dual transcendental chain rule") {
    using std::exp;
    using std::log;
    using std::tanh;
    const double x0 = 0.73;
    Dual<double> x(x0, 1.0);
    CHECK(exp(x).t == doctest::Approx(std::exp(x0)));
    CHECK(log(x).t == doctest::Approx(1.0 / x0));
    CHECK(tanh(x).t == doctest::Approx(1.0 - std::tanh(x0) * std::tanh(x0)));
    CHECK(sqrt(x).t == doctest::Approx(0.5 / std::sqrt(x0)));
}

TEST_SUITE_END();
