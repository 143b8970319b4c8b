// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "ppgtts/weights.hpp"

#include <cstring>
#include <fstream>

#include "ppgtts/rng.hpp"

namespace ppgtts {

namespace {

void add(std::vector<TensorSpec>& v, std::string name, std::vector<int> shape, int fan_in,
         const char* module) {
    v.push_back({std::move(name), std::move(shape), fan_in, module});
}

// attention + feed-forward block tensors under `prefix`
void add_fft_block(std::vector<TensorSpec>& v, const std::string& prefix, int d, int filter,
                   int k1, int k2, const char* module) {
    for (const char* w : {"wq", "wk", "wv", "wo"}) {
        add(v, prefix + ".attn." + w, {d, d}, d, module);
    }
    for (const char* b : {"bq", "bk", "bv", "bo"}) {
        add(v, prefix + ".attn." + b, {d}, d, module);
    }
    add(v, prefix + ".ln1.gamma", {d}, 1, module);
    add(v, prefix + ".ln1.beta", {d}, 1, module);
    add(v, prefix + ".ff.conv1.weight", {filter, d, k1}, d * k1, module);
    add(v, prefix + ".ff.conv1.bias", {filter}, d * k1, module);
    add(v, prefix + ".ff.conv2.weight", {d, filter, k2}, filter * k2, module);
    add(v, prefix + ".ff.conv2.bias", {d}, filter * k2, module);
    add(v, prefix + ".ln2.gamma", {d}, 1, module);
    add(v, prefix + ".ln2.beta", {d}, 1, module);
}

void add_wn(std::vector<TensorSpec>& v, const std::string& prefix, int layers, int hidden,
            int kernel, const char* module) {
    for (int l = 0; l < layers; ++l) {
        const std::string lp = prefix + ".layer" + std::to_string(l);
        add(v, lp + ".in.weight", {2 * hidden, hidden, kernel}, hidden * kernel, module);
        add(v, lp + ".in.bias", {2 * hidden}, hidden * kernel, module);
        add(v, lp + ".skip.weight", {hidden, hidden, 1}, hidden, module);
        add(v, lp + ".skip.bias", {hidden}, hidden, module);
    }
}

void add_coupling(std::vector<TensorSpec>& v, const std::string& prefix, const ModelConfig& cfg) {
    const int half = cfg.latent_dim / 2;
    const int fh = cfg.flow_hidden;
    add(v, prefix + ".pre.weight", {fh, half, 1}, half, "flow");
    add(v, prefix + ".pre.bias", {fh}, half, "flow");
    add_wn(v, prefix + ".wn", cfg.flow_layers, fh, cfg.flow_kernel, "flow");
    add(v, prefix + ".post.weight", {half, fh, 1}, fh, "flow");
    add(v, prefix + ".post.bias", {half}, fh, "flow");
}

}  // namespace

std::vector<TensorSpec> tensor_inventory(const ModelConfig& cfg) {
    std::vector<TensorSpec> v;

    // ---- text2ppg
    {
        const int d = cfg.text2ppg_hidden;
        add(v, "t2p.embedding", {cfg.vocab_size, d}, d, "text2ppg");
        for (int i = 0; i < cfg.text2ppg_blocks; ++i) {
            add_fft_block(v, "t2p.block" + std::to_string(i), d, cfg.text2ppg_filter,
                          cfg.ff_kernel1, cfg.ff_kernel2, "text2ppg");
        }
        for (int j = 0; j < cfg.duration_layers; ++j) {
            const std::string jp = std::to_string(j);
            add(v, "t2p.duration.conv" + jp + ".weight", {d, d, cfg.duration_kernel},
                d * cfg.duration_kernel, "text2ppg");
            add(v, "t2p.duration.conv" + jp + ".bias", {d}, d * cfg.duration_kernel, "text2ppg");
            add(v, "t2p.duration.ln" + jp + ".gamma", {d}, 1, "text2ppg");
            add(v, "t2p.duration.ln" + jp + ".beta", {d}, 1, "text2ppg");
        }
        add(v, "t2p.duration.proj.weight", {1, d}, d, "text2ppg");
        add(v, "t2p.duration.proj.bias", {1}, d, "text2ppg");
        const int pch = cfg.postnet_channels;
        for (int j = 0; j < cfg.postnet_layers; ++j) {
            const int in = j == 0 ? d : pch;
            const int out = j == cfg.postnet_layers - 1 ? d : pch;
            add(v, "t2p.postnet.conv" + std::to_string(j) + ".weight", {out, in, cfg.postnet_kernel},
                in * cfg.postnet_kernel, "text2ppg");
            add(v, "t2p.postnet.conv" + std::to_string(j) + ".bias", {out}, in * cfg.postnet_kernel,
                "text2ppg");
        }
        add(v, "t2p.out.weight", {cfg.ppg_dim, d}, d, "text2ppg");
        add(v, "t2p.out.bias", {cfg.ppg_dim}, d, "text2ppg");
    }

    // ---- prior encoder
    {
        const int p = cfg.prior_hidden;
        add(v, "prior.in.weight", {p, cfg.ppg_dim}, cfg.ppg_dim, "prior_encoder");
        add(v, "prior.in.bias", {p}, cfg.ppg_dim, "prior_encoder");
        add(v, "prior.spk.weight", {p, cfg.speaker_dim}, cfg.speaker_dim, "prior_encoder");
        add(v, "prior.spk.bias", {p}, cfg.speaker_dim, "prior_encoder");
        for (int i = 0; i < cfg.prior_blocks; ++i) {
            add_fft_block(v, "prior.block" + std::to_string(i), p, cfg.prior_filter,
                          cfg.ff_kernel1, cfg.ff_kernel2, "prior_encoder");
        }
        add(v, "prior.out.weight", {2 * cfg.latent_dim, p}, p, "prior_encoder");
        add(v, "prior.out.bias", {2 * cfg.latent_dim}, p, "prior_encoder");
    }

    // ---- flow: one shared coupling distinguished by FLE rows, or one
    // parameter set per coupling and no FLE table.
    if (cfg.share_flow) {
        add_coupling(v, "flow.shared", cfg);
        add(v, "flow.fle", {cfg.flow_couplings, cfg.flow_hidden}, cfg.flow_hidden, "flow");
    } else {
        for (int c = 0; c < cfg.flow_couplings; ++c) {
            add_coupling(v, "flow.coupling" + std::to_string(c), cfg);
        }
    }

    // ---- decoder
    {
        add(v, "dec.spk.weight", {cfg.latent_dim, cfg.speaker_dim}, cfg.speaker_dim, "decoder");
        add(v, "dec.spk.bias", {cfg.latent_dim}, cfg.speaker_dim, "decoder");
        int in_ch = cfg.latent_dim;
        for (size_t s = 0; s < cfg.decoder_channels.size(); ++s) {
            const int out_ch = cfg.decoder_channels[s];
            const int g = cfg.decoder_stage_groups[s];
            const int gr = cfg.decoder_res_groups[s];
            const std::string sp = "dec.stage" + std::to_string(s);
            add(v, sp + ".conv.weight", {out_ch, in_ch / g, cfg.decoder_kernel},
                (in_ch / g) * cfg.decoder_kernel, "decoder");
            add(v, sp + ".conv.bias", {out_ch}, (in_ch / g) * cfg.decoder_kernel, "decoder");
            for (int r = 0; r < 2; ++r) {
                add(v, sp + ".res.conv" + std::to_string(r) + ".weight",
                    {out_ch, out_ch / gr, cfg.decoder_res_kernel},
                    (out_ch / gr) * cfg.decoder_res_kernel, "decoder");
                add(v, sp + ".res.conv" + std::to_string(r) + ".bias", {out_ch},
                    (out_ch / gr) * cfg.decoder_res_kernel, "decoder");
            }
            in_ch = out_ch;
        }
    }

    add(v, "spk.table", {cfg.num_speakers, cfg.speaker_dim}, cfg.speaker_dim, "speaker_embedding");

    // ---- posterior encoder (training scope)
    {
        const int ph = cfg.posterior_hidden;
        const int f = cfg.spectrum_bins();
        add(v, "post.pre.weight", {ph, f, 1}, f, "posterior_encoder");
        add(v, "post.pre.bias", {ph}, f, "posterior_encoder");
        add_wn(v, "post.wn", cfg.posterior_layers, ph, cfg.posterior_kernel, "posterior_encoder");
        add(v, "post.out.weight", {2 * cfg.latent_dim, ph, 1}, ph, "posterior_encoder");
        add(v, "post.out.bias", {2 * cfg.latent_dim}, ph, "posterior_encoder");
    }

    // ---- ppg predictor (training scope)
    {
        const int pp = cfg.ppg_predictor_hidden;
        for (int j = 0; j < cfg.ppg_predictor_layers; ++j) {
            const int in = j == 0 ? cfg.latent_dim : pp;
            add(v, "ppgpred.conv" + std::to_string(j) + ".weight", {pp, in, cfg.ppg_predictor_kernel},
                in * cfg.ppg_predictor_kernel, "ppg_predictor");
            add(v, "ppgpred.conv" + std::to_string(j) + ".bias", {pp}, in * cfg.ppg_predictor_kernel,
                "ppg_predictor");
        }
        add(v, "ppgpred.out.weight", {cfg.ppg_dim, pp}, pp, "ppg_predictor");
        add(v, "ppgpred.out.bias", {cfg.ppg_dim}, pp, "ppg_predictor");
    }

    // ---- discriminators (training scope)
    for (size_t r = 0; r < cfg.disc_fft_sizes.size(); ++r) {
        const std::string rp = "msd.res" + std::to_string(r);
        int in_ch = 1;
        for (size_t l = 0; l < cfg.disc_channels.size(); ++l) {
            const int out_ch = cfg.disc_channels[l];
            add(v, rp + ".conv" + std::to_string(l) + ".weight",
                {out_ch, in_ch, cfg.disc_kernel, cfg.disc_kernel},
                in_ch * cfg.disc_kernel * cfg.disc_kernel, "msd");
            add(v, rp + ".conv" + std::to_string(l) + ".bias", {out_ch},
                in_ch * cfg.disc_kernel * cfg.disc_kernel, "msd");
            in_ch = out_ch;
        }
        add(v, rp + ".out.weight", {1, in_ch, 1, 1}, in_ch, "msd");
        add(v, rp + ".out.bias", {1}, in_ch, "msd");
    }
    for (size_t r = 0; r < cfg.disc_fft_sizes.size(); ++r) {
        const std::string rp = "mcd.res" + std::to_string(r);
        int in_ch = 1;
        for (size_t l = 0; l < cfg.disc_channels.size(); ++l) {
            const int out_ch = cfg.disc_channels[l];
            const std::string lp = rp + ".conv" + std::to_string(l);
            const int fan = in_ch * cfg.disc_kernel * cfg.disc_kernel;
            add(v, lp + ".wre", {out_ch, in_ch, cfg.disc_kernel, cfg.disc_kernel}, fan, "mcd");
            add(v, lp + ".wim", {out_ch, in_ch, cfg.disc_kernel, cfg.disc_kernel}, fan, "mcd");
            add(v, lp + ".bre", {out_ch}, fan, "mcd");
            add(v, lp + ".bim", {out_ch}, fan, "mcd");
            in_ch = out_ch;
        }
        add(v, rp + ".out.wre", {1, in_ch, 1, 1}, in_ch, "mcd");
        add(v, rp + ".out.wim", {1, in_ch, 1, 1}, in_ch, "mcd");
        add(v, rp + ".out.bre", {1}, in_ch, "mcd");
        add(v, rp + ".out.bim", {1}, in_ch, "mcd");
    }

    return v;
}

bool module_in_scope(const std::string& module, Scope scope) {
    if (scope != Scope::Inference) return true;  // training == all modules
    return module == "text2ppg" || module == "prior_encoder" || module == "flow" ||
           module == "decoder" || module == "speaker_embedding";
}

void WeightStore::insert(const std::string& name, Tensor t) {
    if (contains(name)) throw std::runtime_error("weight store: duplicate tensor name '" + name + "'");
    order_.push_back(name);
    index_.emplace(name, std::move(t));
}

const Tensor& WeightStore::get(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::runtime_error("weight store: missing tensor '" + name + "'");
    return it->second;
}

Tensor& WeightStore::mutable_get(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::runtime_error("weight store: missing tensor '" + name + "'");
    return it->second;
}

const Tensor& WeightStore::get(const std::string& name, const std::vector<int>& expected) const {
    const Tensor& t = get(name);
    ensure_shape(t, expected, name);
    return t;
}

WeightStore init_weights(const ModelConfig& cfg, uint64_t seed) {
    WeightStore store;
    for (const TensorSpec& spec : tensor_inventory(cfg)) {
        const double a = std::sqrt(1.0 / spec.fan_in);
        store.insert(spec.name, rng_fill(spec.shape, tensor_seed(spec.name, seed),
                                         Dist::uniform(-a, a)));
    }
    return store;
}

void validate_store(const WeightStore& store, const ModelConfig& cfg, Scope scope) {
    for (const TensorSpec& spec : tensor_inventory(cfg)) {
        if (!module_in_scope(spec.module, scope)) continue;
        store.get(spec.name, spec.shape);
    }
}

// ------------------------------------------------------------ container I/O

namespace {

void put_u16(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct Reader {
    const std::string& buf;
    size_t pos = 0;

    void need(size_t n, const char* what) const {
        if (pos + n > buf.size()) {
            throw std::runtime_error(std::string("weight file: truncated ") + what);
        }
    }
    uint8_t u8(const char* what) {
        need(1, what);
        return static_cast<uint8_t>(buf[pos++]);
    }
    uint16_t u16(const char* what) {
        need(2, what);
        uint16_t v = static_cast<uint8_t>(buf[pos]) | (static_cast<uint16_t>(static_cast<uint8_t>(buf[pos + 1])) << 8);
        pos += 2;
        return v;
    }
    uint32_t u32(const char* what) {
        need(4, what);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    std::string bytes(size_t n, const char* what) {
        need(n, what);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
};

}  // namespace

void save_weights(const WeightStore& store, const std::string& path) {
    std::string out;
    out += "ADVT";
    put_u32(out, 1);  // version
    put_u32(out, static_cast<uint32_t>(store.size()));
    for (const std::string& name : store.names()) {
        const Tensor& t = store.get(name);
        if (name.size() > 0xffff) throw std::runtime_error("weight file: tensor name too long");
        put_u16(out, static_cast<uint16_t>(name.size()));
        out += name;
        out.push_back(static_cast<char>(t.ndim()));
        for (int d : t.shape) put_u32(out, static_cast<uint32_t>(d));
        out.push_back(0);  // dtype f32
        for (float f : t.data) {
            uint32_t bits;
            std::memcpy(&bits, &f, 4);
            put_u32(out, bits);
        }
    }

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw std::runtime_error("short write: " + path);
}

WeightStore load_weights(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open weight file: " + path);
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    Reader r{buf};
    if (r.bytes(4, "magic") != "ADVT") throw std::runtime_error("weight file: bad magic");
    const uint32_t version = r.u32("version");
    if (version != 1) {
        throw std::runtime_error("weight file: unsupported version " + std::to_string(version));
    }
    const uint32_t count = r.u32("tensor count");
    WeightStore store;
    for (uint32_t i = 0; i < count; ++i) {
        const uint16_t name_len = r.u16("name length");
        const std::string name = r.bytes(name_len, "name");
        const uint8_t ndim = r.u8("ndim");
        if (ndim == 0) throw std::runtime_error("weight file: zero-rank tensor '" + name + "'");
        std::vector<int> shape(ndim);
        for (uint8_t d = 0; d < ndim; ++d) {
            const uint32_t dim = r.u32("dims");
            if (dim == 0) throw std::runtime_error("weight file: zero dimension in '" + name + "'");
            shape[d] = static_cast<int>(dim);
        }
        const uint8_t dtype = r.u8("dtype");
        if (dtype != 0) throw std::runtime_error("weight file: unsupported dtype in '" + name + "'");
        const size_t numel = Tensor::numel_of(shape);
        Tensor t(shape);
        r.need(4 * numel, "payload");
        for (size_t e = 0; e < numel; ++e) {
            const uint32_t bits = r.u32("payload");
            float v;
            std::memcpy(&v, &bits, 4);
            t.data[e] = v;
        }
        store.insert(name, std::move(t));
    }
    return store;
}

}  // namespace ppgtts
