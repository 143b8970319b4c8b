// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "ppgtts/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

namespace ppgtts {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    const auto b = s.find_last_not_of(" \t\r\n");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

struct KeyDef {
    std::string name;
    std::function<void(ModelConfig&, const std::string&)> set;
    std::function<std::string(const ModelConfig&)> get;
};

int parse_int(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::invalid_argument("config: bad integer for key '" + key + "': " + v);
    }
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::invalid_argument("config: bad number for key '" + key + "': " + v);
    }
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("config: bad bool for key '" + key + "': " + v);
}

std::vector<int> parse_int_list(const std::string& v, const std::string& key) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string part;
    while (std::getline(ss, part, ',')) {
        part = trim(part);
        if (!part.empty()) out.push_back(parse_int(part, key));
    }
    if (out.empty()) throw std::invalid_argument("config: empty list for key '" + key + "'");
    return out;
}

std::string join(const std::vector<int>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s;
}

#define INT_KEY(field) \
    {#field, [](ModelConfig& c, const std::string& v) { c.field = parse_int(v, #field); }, \
     [](const ModelConfig& c) { return std::to_string(c.field); }}
#define DOUBLE_KEY(field) \
    {#field, [](ModelConfig& c, const std::string& v) { c.field = parse_double(v, #field); }, \
     [](const ModelConfig& c) { std::ostringstream o; o << c.field; return o.str(); }}
#define BOOL_KEY(field) \
    {#field, [](ModelConfig& c, const std::string& v) { c.field = parse_bool(v, #field); }, \
     [](const ModelConfig& c) { return std::string(c.field ? "true" : "false"); }}
#define LIST_KEY(field) \
    {#field, [](ModelConfig& c, const std::string& v) { c.field = parse_int_list(v, #field); }, \
     [](const ModelConfig& c) { return join(c.field); }}

const std::vector<KeyDef>& registry() {
    static const std::vector<KeyDef> defs = {
        INT_KEY(sample_rate),
        INT_KEY(fft_size),
        INT_KEY(hop_length),
        INT_KEY(win_length),
        INT_KEY(num_mels),
        DOUBLE_KEY(mel_fmin),
        DOUBLE_KEY(mel_fmax),
        INT_KEY(ppg_dim),
        INT_KEY(speaker_dim),
        INT_KEY(num_speakers),
        INT_KEY(vocab_size),
        INT_KEY(text2ppg_hidden),
        INT_KEY(text2ppg_filter),
        INT_KEY(text2ppg_heads),
        INT_KEY(text2ppg_blocks),
        INT_KEY(ff_kernel1),
        INT_KEY(ff_kernel2),
        INT_KEY(duration_layers),
        INT_KEY(duration_kernel),
        INT_KEY(postnet_layers),
        INT_KEY(postnet_kernel),
        INT_KEY(postnet_channels),
        INT_KEY(latent_dim),
        INT_KEY(prior_hidden),
        INT_KEY(prior_filter),
        INT_KEY(prior_heads),
        INT_KEY(prior_blocks),
        INT_KEY(posterior_layers),
        INT_KEY(posterior_hidden),
        INT_KEY(posterior_kernel),
        INT_KEY(flow_couplings),
        INT_KEY(flow_layers),
        INT_KEY(flow_hidden),
        INT_KEY(flow_kernel),
        BOOL_KEY(share_flow),
        LIST_KEY(decoder_channels),
        INT_KEY(decoder_kernel),
        LIST_KEY(decoder_stage_groups),
        LIST_KEY(decoder_res_groups),
        INT_KEY(decoder_res_kernel),
        INT_KEY(ppg_predictor_layers),
        INT_KEY(ppg_predictor_hidden),
        INT_KEY(ppg_predictor_kernel),
        LIST_KEY(disc_fft_sizes),
        LIST_KEY(disc_hops),
        LIST_KEY(disc_wins),
        LIST_KEY(disc_channels),
        INT_KEY(disc_kernel),
        DOUBLE_KEY(disc_lrelu_slope),
        {"attention_kind",
         [](ModelConfig& c, const std::string& v) {
             if (v == "linear") c.attention_kind = AttentionKind::Linear;
             else if (v == "scaled_dot") c.attention_kind = AttentionKind::ScaledDot;
             else throw std::invalid_argument("config: attention_kind must be linear|scaled_dot");
         },
         [](const ModelConfig& c) { return std::string(to_string(c.attention_kind)); }},
        {"decoder_kind",
         [](ModelConfig& c, const std::string& v) {
             if (v == "istft") c.decoder_kind = DecoderKind::Istft;
             else if (v == "upsampling_baseline") c.decoder_kind = DecoderKind::UpsamplingBaseline;
             else throw std::invalid_argument("config: decoder_kind must be istft|upsampling_baseline");
         },
         [](const ModelConfig& c) { return std::string(to_string(c.decoder_kind)); }},
        {"scope",
         [](ModelConfig& c, const std::string& v) { c.scope = scope_from_string(v); },
         [](const ModelConfig& c) { return std::string(to_string(c.scope)); }},
        DOUBLE_KEY(phonemes_per_second),
    };
    return defs;
}

#undef INT_KEY
#undef DOUBLE_KEY
#undef BOOL_KEY
#undef LIST_KEY

void check_divides(int a, int b, const std::string& what) {
    if (a < 1 || b % a != 0) {
        throw std::invalid_argument("config: " + what + " (" + std::to_string(a) +
                                    " must divide " + std::to_string(b) + ")");
    }
}

void check_odd(int k, const std::string& what) {
    if (k < 1 || k % 2 == 0) {
        throw std::invalid_argument("config: " + what + " must be odd and >= 1, got " + std::to_string(k));
    }
}

}  // namespace

const char* to_string(AttentionKind k) { return k == AttentionKind::Linear ? "linear" : "scaled_dot"; }
const char* to_string(DecoderKind k) { return k == DecoderKind::Istft ? "istft" : "upsampling_baseline"; }
const char* to_string(Scope s) {
    switch (s) {
        case Scope::Inference: return "inference";
        case Scope::Training: return "training";
        default: return "all";
    }
}
const char* to_string(MacConvention c) { return c == MacConvention::Mac2 ? "mac2" : "mac1"; }

Scope scope_from_string(const std::string& s) {
    if (s == "inference") return Scope::Inference;
    if (s == "training") return Scope::Training;
    if (s == "all") return Scope::All;
    throw std::invalid_argument("scope must be inference|training|all, got '" + s + "'");
}

MacConvention convention_from_string(const std::string& s) {
    if (s == "mac2") return MacConvention::Mac2;
    if (s == "mac1") return MacConvention::Mac1;
    throw std::invalid_argument("convention must be mac2|mac1, got '" + s + "'");
}

ModelConfig parse_config(const std::string& text) {
    ModelConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: line " + std::to_string(lineno) + " is not 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        bool found = false;
        for (const auto& def : registry()) {
            if (def.name == key) {
                def.set(cfg, value);
                found = true;
                break;
            }
        }
        if (!found) {
            throw std::invalid_argument("config: unknown key '" + key + "' (line " +
                                        std::to_string(lineno) + ")");
        }
    }
    cfg.validate();
    return cfg;
}

ModelConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ModelConfig& cfg) {
    std::string out;
    for (const auto& def : registry()) {
        out += def.name + " = " + def.get(cfg) + "\n";
    }
    return out;
}

void ModelConfig::validate() const {
    stft().validate();
    if (sample_rate < 1) throw std::invalid_argument("config: sample_rate must be positive");
    if (num_mels < 1) throw std::invalid_argument("config: num_mels must be >= 1");
    if (mel_fmax <= mel_fmin || mel_fmax > sample_rate / 2.0) {
        throw std::invalid_argument("config: need mel_fmin < mel_fmax <= sample_rate/2");
    }
    if (vocab_size < 1 || num_speakers < 1) throw std::invalid_argument("config: empty tables");
    check_divides(text2ppg_heads, text2ppg_hidden, "text2ppg heads must divide hidden");
    check_divides(prior_heads, prior_hidden, "prior heads must divide hidden");
    check_odd(ff_kernel1, "ff_kernel1");
    check_odd(ff_kernel2, "ff_kernel2");
    check_odd(duration_kernel, "duration_kernel");
    check_odd(postnet_kernel, "postnet_kernel");
    check_odd(posterior_kernel, "posterior_kernel");
    check_odd(flow_kernel, "flow_kernel");
    check_odd(decoder_kernel, "decoder_kernel");
    check_odd(decoder_res_kernel, "decoder_res_kernel");
    check_odd(ppg_predictor_kernel, "ppg_predictor_kernel");
    check_odd(disc_kernel, "disc_kernel");
    if (latent_dim % 2 != 0) throw std::invalid_argument("config: latent_dim must be even");
    if (flow_couplings < 1 || flow_layers < 1) throw std::invalid_argument("config: flow depth");
    if (decoder_channels.size() != decoder_stage_groups.size() ||
        decoder_channels.size() != decoder_res_groups.size() || decoder_channels.empty()) {
        throw std::invalid_argument("config: decoder channel/group lists must have equal size");
    }
    if (decoder_channels.back() != 2 * spectrum_bins()) {
        throw std::invalid_argument("config: last decoder channel must equal 2*(fft_size/2+1) = " +
                                    std::to_string(2 * spectrum_bins()));
    }
    int prev = latent_dim;
    for (size_t s = 0; s < decoder_channels.size(); ++s) {
        check_divides(decoder_stage_groups[s], prev, "decoder stage group vs in channels");
        check_divides(decoder_stage_groups[s], decoder_channels[s], "decoder stage group vs out channels");
        check_divides(decoder_res_groups[s], decoder_channels[s], "decoder res group vs channels");
        prev = decoder_channels[s];
    }
    if (disc_fft_sizes.size() != disc_hops.size() || disc_fft_sizes.size() != disc_wins.size() ||
        disc_fft_sizes.empty()) {
        throw std::invalid_argument("config: discriminator resolution lists must have equal size");
    }
    for (size_t r = 0; r < disc_fft_sizes.size(); ++r) {
        StftConfig rc{disc_fft_sizes[r], disc_hops[r], disc_wins[r]};
        rc.validate();
    }
    if (disc_channels.empty()) throw std::invalid_argument("config: disc_channels empty");
    if (phonemes_per_second <= 0.0) throw std::invalid_argument("config: phonemes_per_second must be > 0");
}

ModelConfig ModelConfig::micro() {
    ModelConfig c;
    c.fft_size = 16;
    c.hop_length = 4;
    c.win_length = 8;
    c.num_mels = 6;
    c.mel_fmax = 8000.0;
    c.ppg_dim = 12;
    c.speaker_dim = 8;
    c.num_speakers = 4;
    c.vocab_size = 16;
    c.text2ppg_hidden = 8;
    c.text2ppg_filter = 16;
    c.text2ppg_heads = 2;
    c.text2ppg_blocks = 2;
    c.ff_kernel1 = 3;
    c.ff_kernel2 = 1;
    c.duration_layers = 2;
    c.duration_kernel = 3;
    c.postnet_layers = 3;
    c.postnet_kernel = 3;
    c.postnet_channels = 8;
    c.latent_dim = 8;
    c.prior_hidden = 8;
    c.prior_filter = 16;
    c.prior_heads = 2;
    c.prior_blocks = 2;
    c.posterior_layers = 2;
    c.posterior_hidden = 8;
    c.posterior_kernel = 3;
    c.flow_couplings = 4;
    c.flow_layers = 2;
    c.flow_hidden = 8;
    c.flow_kernel = 3;
    c.decoder_channels = {8, 12, 18};
    c.decoder_kernel = 3;
    c.decoder_stage_groups = {2, 2, 3};
    c.decoder_res_groups = {2, 2, 3};
    c.decoder_res_kernel = 3;
    c.ppg_predictor_layers = 2;
    c.ppg_predictor_hidden = 8;
    c.ppg_predictor_kernel = 3;
    c.disc_fft_sizes = {32, 64};
    c.disc_hops = {8, 16};
    c.disc_wins = {32, 64};
    c.disc_channels = {4, 8, 8, 8};
    c.disc_kernel = 3;
    c.validate();
    return c;
}

}  // namespace ppgtts
