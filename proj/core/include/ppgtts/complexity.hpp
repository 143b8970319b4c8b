// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ppgtts/config.hpp"

namespace ppgtts {

// Analytic per-op multiply-accumulate counts. These formulas mirror the
// runtime kernels exactly: an instrumented forward pass must match them as
// integers (see the macs counter). Bias adds, norms and activations are not
// MACs and are excluded on both sides. Counts assume unmasked sequences.
namespace cost {

uint64_t conv1d_macs(int c_in, int c_out, int k, int groups, int t_out);
uint64_t conv2d_macs(int c_in, int c_out, int kh, int kw, int h_out, int w_out);
uint64_t linear_macs(int rows, int in, int out);
uint64_t attention_macs(AttentionKind kind, int t, int d, int heads);
uint64_t fft_block_macs(AttentionKind kind, int t, int d, int filter, int k1, int k2, int heads);
uint64_t wn_stack_macs(int layers, int hidden, int kernel, int t);
uint64_t coupling_macs(const ModelConfig& cfg, int t);

uint64_t text2ppg_macs(const ModelConfig& cfg, int tokens, int frames);
uint64_t prior_macs(const ModelConfig& cfg, int frames);
uint64_t flow_macs(const ModelConfig& cfg, int frames);
uint64_t istft_decoder_macs(const ModelConfig& cfg, int frames);
uint64_t posterior_macs(const ModelConfig& cfg, int frames);
uint64_t ppg_predictor_macs(const ModelConfig& cfg, int frames);
uint64_t msd_macs(const ModelConfig& cfg, int samples);
uint64_t mcd_macs(const ModelConfig& cfg, int samples);

// Analytic-only cost model of a transposed-conv upsampling decoder
// (strides 5,5,4,2 to reach the hop, channel halving from 128, multi-kernel
// residual stacks). Used solely for the decoder-swap comparison.
uint64_t upsampling_decoder_macs(const ModelConfig& cfg, int frames);
uint64_t upsampling_decoder_params(const ModelConfig& cfg);

// FFT work is not made of MACs; it enters the FLOP totals directly as
// 5 * F * log2(F) real FLOPs per frame.
double fft_flops(int fft_size, int frames);

}  // namespace cost

struct ModuleCost {
    std::string module;
    uint64_t params = 0;
    uint64_t macs = 0;
    double flops = 0.0;  // under the report's convention, FFT terms included
};

struct ComplexityReport {
    Scope scope = Scope::Inference;
    MacConvention convention = MacConvention::Mac2;
    double seconds = 0.0;
    int frames = 0;
    int tokens = 0;
    double phonemes_per_second = 0.0;
    std::vector<ModuleCost> modules;
    uint64_t total_params = 0;
    uint64_t total_macs = 0;
    double total_flops = 0.0;

    double gflops() const { return total_flops / 1e9; }
    double gmacs() const { return static_cast<double>(total_macs) / 1e9; }
    std::string to_table() const;
    std::string to_json() const;
};

// Exact integer parameter counts per module, grouped from the tensor
// inventory (the same list init_weights fills).
ComplexityReport count_params(const ModelConfig& cfg, Scope scope);

// Analytic FLOPs for synthesizing `seconds` of audio. Token count for the
// text front end comes from phonemes_per_second.
ComplexityReport count_flops(const ModelConfig& cfg, double seconds, Scope scope,
                             MacConvention convention);

}  // namespace ppgtts
