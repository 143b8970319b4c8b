// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "ppgtts/complexity.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "ppgtts/discriminators.hpp"
#include "ppgtts/ops.hpp"
#include "ppgtts/weights.hpp"

namespace ppgtts {

namespace cost {

uint64_t conv1d_macs(int c_in, int c_out, int k, int groups, int t_out) {
    return static_cast<uint64_t>(t_out) * c_out * (c_in / groups) * k;
}

uint64_t conv2d_macs(int c_in, int c_out, int kh, int kw, int h_out, int w_out) {
    return static_cast<uint64_t>(h_out) * w_out * c_out * c_in * kh * kw;
}

uint64_t linear_macs(int rows, int in, int out) {
    return static_cast<uint64_t>(rows) * in * out;
}

uint64_t attention_macs(AttentionKind kind, int t, int d, int heads) {
    const uint64_t proj = 4ull * t * d * d;
    const int dh = d / heads;
    if (kind == AttentionKind::ScaledDot) {
        return proj + static_cast<uint64_t>(heads) * 2ull * t * t * dh;  // QK^T + weights*V
    }
    // summary phi(K)^T V, numerator, denominator dots
    return proj + static_cast<uint64_t>(heads) *
                      (2ull * t * dh * dh + static_cast<uint64_t>(t) * dh);
}

uint64_t fft_block_macs(AttentionKind kind, int t, int d, int filter, int k1, int k2, int heads) {
    return attention_macs(kind, t, d, heads) + conv1d_macs(d, filter, k1, 1, t) +
           conv1d_macs(filter, d, k2, 1, t);
}

uint64_t wn_stack_macs(int layers, int hidden, int kernel, int t) {
    uint64_t per_layer = conv1d_macs(hidden, 2 * hidden, kernel, 1, t) +
                         conv1d_macs(hidden, hidden, 1, 1, t);
    return static_cast<uint64_t>(layers) * per_layer;
}

uint64_t coupling_macs(const ModelConfig& cfg, int t) {
    const int half = cfg.latent_dim / 2, fh = cfg.flow_hidden;
    return conv1d_macs(half, fh, 1, 1, t) + wn_stack_macs(cfg.flow_layers, fh, cfg.flow_kernel, t) +
           conv1d_macs(fh, half, 1, 1, t);
}

uint64_t text2ppg_macs(const ModelConfig& cfg, int tokens, int frames) {
    const int d = cfg.text2ppg_hidden;
    uint64_t total = 0;
    for (int b = 0; b < cfg.text2ppg_blocks; ++b) {
        total += fft_block_macs(cfg.attention_kind, tokens, d, cfg.text2ppg_filter, cfg.ff_kernel1,
                                cfg.ff_kernel2, cfg.text2ppg_heads);
    }
    for (int j = 0; j < cfg.duration_layers; ++j) {
        total += conv1d_macs(d, d, cfg.duration_kernel, 1, tokens);
    }
    total += linear_macs(tokens, d, 1);
    const int pch = cfg.postnet_channels;
    for (int j = 0; j < cfg.postnet_layers; ++j) {
        const int in = j == 0 ? d : pch;
        const int out = j == cfg.postnet_layers - 1 ? d : pch;
        total += conv1d_macs(in, out, cfg.postnet_kernel, 1, frames);
    }
    total += linear_macs(frames, d, cfg.ppg_dim);
    return total;
}

uint64_t prior_macs(const ModelConfig& cfg, int frames) {
    const int p = cfg.prior_hidden;
    uint64_t total = linear_macs(frames, cfg.ppg_dim, p);
    total += linear_macs(1, cfg.speaker_dim, p);  // speaker projection, once
    for (int b = 0; b < cfg.prior_blocks; ++b) {
        total += fft_block_macs(cfg.attention_kind, frames, p, cfg.prior_filter, cfg.ff_kernel1,
                                cfg.ff_kernel2, cfg.prior_heads);
    }
    total += linear_macs(frames, p, 2 * cfg.latent_dim);
    return total;
}

uint64_t flow_macs(const ModelConfig& cfg, int frames) {
    return static_cast<uint64_t>(cfg.flow_couplings) * coupling_macs(cfg, frames);
}

uint64_t istft_decoder_macs(const ModelConfig& cfg, int frames) {
    uint64_t total = linear_macs(1, cfg.speaker_dim, cfg.latent_dim);
    int in_ch = cfg.latent_dim;
    for (size_t s = 0; s < cfg.decoder_channels.size(); ++s) {
        const int out_ch = cfg.decoder_channels[s];
        total += conv1d_macs(in_ch, out_ch, cfg.decoder_kernel, cfg.decoder_stage_groups[s], frames);
        total += 2ull * conv1d_macs(out_ch, out_ch, cfg.decoder_res_kernel,
                                    cfg.decoder_res_groups[s], frames);
        in_ch = out_ch;
    }
    return total;
}

uint64_t posterior_macs(const ModelConfig& cfg, int frames) {
    const int h = cfg.posterior_hidden;
    return conv1d_macs(cfg.spectrum_bins(), h, 1, 1, frames) +
           wn_stack_macs(cfg.posterior_layers, h, cfg.posterior_kernel, frames) +
           conv1d_macs(h, 2 * cfg.latent_dim, 1, 1, frames);
}

uint64_t ppg_predictor_macs(const ModelConfig& cfg, int frames) {
    const int pp = cfg.ppg_predictor_hidden;
    uint64_t total = 0;
    for (int j = 0; j < cfg.ppg_predictor_layers; ++j) {
        const int in = j == 0 ? cfg.latent_dim : pp;
        total += conv1d_macs(in, pp, cfg.ppg_predictor_kernel, 1, frames);
    }
    total += linear_macs(frames, pp, cfg.ppg_dim);
    return total;
}

namespace {

uint64_t disc_stack_macs(const ModelConfig& cfg, int samples, int convs_per_layer) {
    uint64_t total = 0;
    for (const DiscResolution& res : disc_resolutions(cfg)) {
        int h = res.fft_size / 2 + 1;
        int w = disc_frames(samples, res);
        int in_ch = 1;
        for (size_t l = 0; l < cfg.disc_channels.size(); ++l) {
            const Conv2dOpts opt = disc_conv_opts(cfg.disc_kernel, l);
            const int h_out = conv2d_out_len(h, cfg.disc_kernel, opt.stride_h, opt.pad_h);
            const int w_out = conv2d_out_len(w, cfg.disc_kernel, opt.stride_w, opt.pad_w);
            total += static_cast<uint64_t>(convs_per_layer) *
                     conv2d_macs(in_ch, cfg.disc_channels[l], cfg.disc_kernel, cfg.disc_kernel,
                                 h_out, w_out);
            h = h_out;
            w = w_out;
            in_ch = cfg.disc_channels[l];
        }
        total += static_cast<uint64_t>(convs_per_layer) * conv2d_macs(in_ch, 1, 1, 1, h, w);
    }
    return total;
}

}  // namespace

uint64_t msd_macs(const ModelConfig& cfg, int samples) { return disc_stack_macs(cfg, samples, 1); }

// complex conv = 4 real convs
uint64_t mcd_macs(const ModelConfig& cfg, int samples) { return disc_stack_macs(cfg, samples, 4); }

double fft_flops(int fft_size, int frames) {
    return 5.0 * fft_size * std::log2(static_cast<double>(fft_size)) * frames;
}

namespace {

struct UpsamplingStage {
    int stride;
    int c_in, c_out;
};

struct UpsamplingPlan {
    int pre_kernel = 7;
    int initial_channels = 128;
    std::vector<UpsamplingStage> stages;
    std::vector<int> res_kernels{3, 7, 11};
    int res_convs_per_kernel = 6;  // 3 dilated + 3 plain, per kernel size
};

UpsamplingPlan upsampling_plan(const ModelConfig& cfg) {
    UpsamplingPlan p;
    const std::vector<int> strides{5, 5, 4, 2};
    int product = 1;
    for (int s : strides) product *= s;
    if (product != cfg.hop_length) {
        // desk-scale configs with other hops: fold the hop into one stage
        p.stages.push_back({cfg.hop_length, p.initial_channels, p.initial_channels / 2});
        return p;
    }
    int c = p.initial_channels;
    for (int s : strides) {
        p.stages.push_back({s, c, c / 2});
        c /= 2;
    }
    return p;
}

}  // namespace

uint64_t upsampling_decoder_macs(const ModelConfig& cfg, int frames) {
    const UpsamplingPlan p = upsampling_plan(cfg);
    uint64_t total = linear_macs(1, cfg.speaker_dim, cfg.latent_dim);
    total += conv1d_macs(cfg.latent_dim, p.initial_channels, p.pre_kernel, 1, frames);
    int64_t t = frames;
    int c_last = p.initial_channels;
    for (const UpsamplingStage& st : p.stages) {
        const int k = 2 * st.stride;
        // transposed conv: every input position contributes k taps per output channel
        total += static_cast<uint64_t>(t) * st.c_in * st.c_out * k;
        t *= st.stride;
        for (int rk : p.res_kernels) {
            total += static_cast<uint64_t>(p.res_convs_per_kernel) *
                     conv1d_macs(st.c_out, st.c_out, rk, 1, static_cast<int>(t));
        }
        c_last = st.c_out;
    }
    total += conv1d_macs(c_last, 1, p.pre_kernel, 1, static_cast<int>(t));
    return total;
}

uint64_t upsampling_decoder_params(const ModelConfig& cfg) {
    const UpsamplingPlan p = upsampling_plan(cfg);
    auto conv_params = [](int c_in, int c_out, int k) {
        return static_cast<uint64_t>(c_out) * c_in * k + c_out;
    };
    uint64_t total = static_cast<uint64_t>(cfg.latent_dim) * cfg.speaker_dim + cfg.latent_dim;
    total += conv_params(cfg.latent_dim, p.initial_channels, p.pre_kernel);
    int c_last = p.initial_channels;
    for (const UpsamplingStage& st : p.stages) {
        total += conv_params(st.c_in, st.c_out, 2 * st.stride);
        for (int rk : p.res_kernels) {
            total += static_cast<uint64_t>(p.res_convs_per_kernel) * conv_params(st.c_out, st.c_out, rk);
        }
        c_last = st.c_out;
    }
    total += conv_params(c_last, 1, p.pre_kernel);
    return total;
}

}  // namespace cost

namespace {

const std::vector<std::string>& module_order() {
    static const std::vector<std::string> order = {
        "text2ppg",  "prior_encoder", "flow", "decoder", "speaker_embedding",
        "posterior_encoder", "ppg_predictor", "msd", "mcd"};
    return order;
}

uint64_t module_params(const ModelConfig& cfg, const std::string& module) {
    if (module == "decoder" && cfg.decoder_kind == DecoderKind::UpsamplingBaseline) {
        return cost::upsampling_decoder_params(cfg);
    }
    uint64_t total = 0;
    for (const TensorSpec& spec : tensor_inventory(cfg)) {
        if (spec.module == module) total += spec.numel();
    }
    return total;
}

}  // namespace

ComplexityReport count_params(const ModelConfig& cfg, Scope scope) {
    cfg.validate();
    ComplexityReport r;
    r.scope = scope;
    for (const std::string& m : module_order()) {
        if (!module_in_scope(m, scope)) continue;
        ModuleCost mc;
        mc.module = m;
        mc.params = module_params(cfg, m);
        r.modules.push_back(mc);
        r.total_params += mc.params;
    }
    return r;
}

ComplexityReport count_flops(const ModelConfig& cfg, double seconds, Scope scope,
                             MacConvention convention) {
    cfg.validate();
    if (seconds <= 0.0) throw std::invalid_argument("count_flops: seconds must be > 0");

    ComplexityReport r = count_params(cfg, scope);
    r.convention = convention;
    r.seconds = seconds;
    r.phonemes_per_second = cfg.phonemes_per_second;
    r.frames = static_cast<int>(std::llround(seconds * cfg.sample_rate / cfg.hop_length));
    r.tokens = std::max(1, static_cast<int>(std::llround(seconds * cfg.phonemes_per_second)));
    const int samples = static_cast<int>(std::llround(seconds * cfg.sample_rate));
    const double per_mac = convention == MacConvention::Mac2 ? 2.0 : 1.0;

    for (ModuleCost& m : r.modules) {
        double fft_extra = 0.0;
        if (m.module == "text2ppg") {
            m.macs = cost::text2ppg_macs(cfg, r.tokens, r.frames);
        } else if (m.module == "prior_encoder") {
            m.macs = cost::prior_macs(cfg, r.frames);
        } else if (m.module == "flow") {
            m.macs = cost::flow_macs(cfg, r.frames);
        } else if (m.module == "decoder") {
            if (cfg.decoder_kind == DecoderKind::Istft) {
                m.macs = cost::istft_decoder_macs(cfg, r.frames);
                fft_extra = cost::fft_flops(cfg.fft_size, r.frames);
            } else {
                m.macs = cost::upsampling_decoder_macs(cfg, r.frames);
            }
        } else if (m.module == "speaker_embedding") {
            m.macs = 0;  // table lookup
        } else if (m.module == "posterior_encoder") {
            m.macs = cost::posterior_macs(cfg, r.frames);
            fft_extra = cost::fft_flops(cfg.fft_size, r.frames);  // input spectrum
        } else if (m.module == "ppg_predictor") {
            m.macs = cost::ppg_predictor_macs(cfg, r.frames);
        } else if (m.module == "msd") {
            m.macs = cost::msd_macs(cfg, samples);
            for (const DiscResolution& res : disc_resolutions(cfg)) {
                fft_extra += cost::fft_flops(res.fft_size, disc_frames(samples, res));
            }
        } else if (m.module == "mcd") {
            m.macs = cost::mcd_macs(cfg, samples);
            for (const DiscResolution& res : disc_resolutions(cfg)) {
                fft_extra += cost::fft_flops(res.fft_size, disc_frames(samples, res));
            }
        }
        m.flops = per_mac * static_cast<double>(m.macs) + fft_extra;
        r.total_macs += m.macs;
        r.total_flops += m.flops;
    }
    return r;
}

std::string ComplexityReport::to_table() const {
    std::ostringstream os;
    os << "scope: " << ppgtts::to_string(scope);
    if (seconds > 0.0) {
        os << "   seconds: " << seconds << "   convention: " << ppgtts::to_string(convention)
           << "   frames: " << frames << "   tokens: " << tokens;
    }
    os << "\n";
    os << "module              params          MACs        GFLOPs\n";
    os << "------------------  ------------  ------------  --------\n";
    char line[160];
    for (const ModuleCost& m : modules) {
        std::snprintf(line, sizeof(line), "%-18s  %12llu  %12llu  %8.4f\n", m.module.c_str(),
                      static_cast<unsigned long long>(m.params),
                      static_cast<unsigned long long>(m.macs), m.flops / 1e9);
        os << line;
    }
    std::snprintf(line, sizeof(line), "%-18s  %12llu  %12llu  %8.4f\n", "total",
                  static_cast<unsigned long long>(total_params),
                  static_cast<unsigned long long>(total_macs), total_flops / 1e9);
    os << line;
    std::snprintf(line, sizeof(line), "total params: %.3fM   total: %.4f GFLOPs (%.4f GMACs)\n",
                  total_params / 1e6, gflops(), gmacs());
    os << line;
    return os.str();
}

std::string ComplexityReport::to_json() const {
    nlohmann::json j;
    j["scope"] = ppgtts::to_string(scope);
    j["total_params"] = total_params;
    if (seconds > 0.0) {
        j["seconds"] = seconds;
        j["convention"] = ppgtts::to_string(convention);
        j["frames"] = frames;
        j["tokens"] = tokens;
        j["phonemes_per_second"] = phonemes_per_second;
        j["total_macs"] = total_macs;
        j["total_flops"] = total_flops;
        j["gflops"] = gflops();
    }
    nlohmann::json mods = nlohmann::json::array();
    for (const ModuleCost& m : modules) {
        nlohmann::json mj;
        mj["module"] = m.module;
        mj["params"] = m.params;
        if (seconds > 0.0) {
            mj["macs"] = m.macs;
            mj["flops"] = m.flops;
        }
        mods.push_back(mj);
    }
    j["modules"] = mods;
    return j.dump(2);
}

}  // namespace ppgtts
