// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>
#include <vector>

#include "ppgtts/attention.hpp"
#include "ppgtts/dsp.hpp"

namespace ppgtts {

enum class DecoderKind { Istft, UpsamplingBaseline };
enum class Scope { Inference, Training, All };
enum class MacConvention { Mac2, Mac1 };

// Every architectural hyperparameter, serializable to/from the `key = value`
// config format. Unknown keys in a file are hard errors.
struct ModelConfig {
    // signal
    int sample_rate = 16000;
    int fft_size = 1024;
    int hop_length = 200;
    int win_length = 800;
    int num_mels = 80;
    double mel_fmin = 0.0;
    double mel_fmax = 8000.0;

    // shared dims
    int ppg_dim = 256;
    int speaker_dim = 256;
    int num_speakers = 16;
    int vocab_size = 128;

    // text2ppg
    int text2ppg_hidden = 128;
    int text2ppg_filter = 768;
    int text2ppg_heads = 4;
    int text2ppg_blocks = 2;
    int ff_kernel1 = 9;
    int ff_kernel2 = 1;
    int duration_layers = 2;
    int duration_kernel = 3;
    int postnet_layers = 5;
    int postnet_kernel = 5;
    int postnet_channels = 256;

    // cvae
    int latent_dim = 192;
    int prior_hidden = 192;
    int prior_filter = 768;
    int prior_heads = 4;
    int prior_blocks = 2;
    int posterior_layers = 16;
    int posterior_hidden = 192;
    int posterior_kernel = 5;
    int flow_couplings = 4;
    int flow_layers = 4;
    int flow_hidden = 192;
    int flow_kernel = 3;
    bool share_flow = true;

    // decoder
    std::vector<int> decoder_channels{256, 384, 1026};
    int decoder_kernel = 3;
    std::vector<int> decoder_stage_groups{4, 8, 6};
    std::vector<int> decoder_res_groups{4, 8, 18};
    int decoder_res_kernel = 3;

    // ppg predictor
    int ppg_predictor_layers = 2;
    int ppg_predictor_hidden = 192;
    int ppg_predictor_kernel = 5;

    // discriminators
    std::vector<int> disc_fft_sizes{512, 1024, 2048};
    std::vector<int> disc_hops{128, 256, 512};
    std::vector<int> disc_wins{512, 1024, 2048};
    std::vector<int> disc_channels{16, 32, 64, 64};
    int disc_kernel = 3;
    double disc_lrelu_slope = 0.2;

    // switches
    AttentionKind attention_kind = AttentionKind::Linear;
    DecoderKind decoder_kind = DecoderKind::Istft;
    Scope scope = Scope::Inference;
    double phonemes_per_second = 12.0;

    StftConfig stft() const { return {fft_size, hop_length, win_length}; }
    MelConfig mel() const { return {num_mels, mel_fmin, mel_fmax, 1e-5}; }
    int spectrum_bins() const { return fft_size / 2 + 1; }

    // Desk-scale config for derivative checks and fast property tests.
    static ModelConfig micro();

    void validate() const;
};

ModelConfig parse_config(const std::string& text);
ModelConfig load_config_file(const std::string& path);
std::string serialize_config(const ModelConfig& cfg);

const char* to_string(AttentionKind k);
const char* to_string(DecoderKind k);
const char* to_string(Scope s);
const char* to_string(MacConvention c);
Scope scope_from_string(const std::string& s);
MacConvention convention_from_string(const std::string& s);

}  // namespace ppgtts
