// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>

#include "ppgtts/losses.hpp"

namespace ppgtts {

namespace {

// Fixed input seeds; the probes must be deterministic functions of the config.
constexpr uint64_t kZSeed = 0x5eed0001;
constexpr uint64_t kWaveSeed = 0x5eed0002;
constexpr uint64_t kPpgSeed = 0x5eed0003;
constexpr uint64_t kEpsSeed = 0x5eed0004;

struct ProbeInputs {
    Tensor z;         // [frames, latent]
    Tensor wave_ref;  // [len]
    Tensor ppg_ref_z;      // [frames, ppg_dim], matched to z frames
    Tensor ppg_ref_post;   // [post_frames, ppg_dim], matched to posterior frames
    Tensor eps;       // [post_frames, latent]
    int frames = 0;
    int post_frames = 0;
};

ProbeInputs make_inputs(const ModelConfig& cfg) {
    ProbeInputs in;
    in.frames = 16;
    int len = in.frames * cfg.hop_length;
    for (size_t r = 0; r < cfg.disc_fft_sizes.size(); ++r) {
        len = std::max(len, cfg.disc_wins[r]);
    }
    in.post_frames = stft_frames(len, cfg.stft());
    in.z = rng_fill({in.frames, cfg.latent_dim}, kZSeed, Dist::normal(0.0, 1.0));
    in.wave_ref = rng_fill({len}, kWaveSeed, Dist::uniform(-0.5, 0.5));
    in.ppg_ref_z = rng_fill({in.frames, cfg.ppg_dim}, kPpgSeed, Dist::normal(0.0, 1.0));
    in.ppg_ref_post = rng_fill({in.post_frames, cfg.ppg_dim}, kPpgSeed + 1, Dist::normal(0.0, 1.0));
    in.eps = rng_fill({in.post_frames, cfg.latent_dim}, kEpsSeed, Dist::normal(0.0, 1.0));
    return in;
}

template <class T>
std::vector<T> cast_vec(const Tensor& t) {
    std::vector<T> out(t.data.size());
    for (size_t i = 0; i < t.data.size(); ++i) out[i] = T(t.data[i]);
    return out;
}

template <class T>
T eval_loss(LossId id, const ModelConfig& cfg, const WeightSource<T>& src,
            const ProbeInputs& in) {
    if (id == LossId::Quadratic) {
        T acc(0);
        for (const TensorSpec& spec : tensor_inventory(cfg)) {
            TensorT<T> t = src.get(spec.name, spec.shape);
            for (const T& v : t.data) acc += v * v;
        }
        return acc;
    }

    std::vector<T> speaker = load_speaker_row(cfg, src, 0);
    switch (id) {
        case LossId::Recon: {
            DecoderWeightsT<T> dec = load_decoder(cfg, src);
            std::vector<T> wave_hat = decode(cast_tensor<T>(in.z), speaker, dec, cfg.stft());
            return recon_loss(wave_hat, cast_vec<T>(in.wave_ref), cfg.stft(), cfg.mel(),
                              cfg.sample_rate);
        }
        case LossId::Kl: {
            PosteriorWeightsT<T> post_w = load_posterior(cfg, src);
            PriorWeightsT<T> prior_w = load_prior(cfg, src);
            FlowWeightsT<T> flow_w = load_flow(cfg, src);
            TensorT<T> linspec = linear_spectrogram(cast_vec<T>(in.wave_ref), cfg.stft());
            TensorT<T> eps = cast_tensor<T>(in.eps);
            PosteriorResult<T> post = posterior_encode(linspec, post_w, &eps);
            FlowResult<T> flow = flow_forward(post.z, static_cast<const std::vector<T>*>(nullptr), flow_w);
            GaussianParamsT<T> prior = prior_encode(cast_tensor<T>(in.ppg_ref_post), speaker, prior_w);
            return kl_loss(post.post, post.z, flow.z, flow.log_det, prior);
        }
        case LossId::Ppg: {
            PpgPredictorWeightsT<T> pred_w = load_ppg_predictor(cfg, src);
            TensorT<T> pred = ppg_predict(cast_tensor<T>(in.z), pred_w);
            return ppg_loss(pred, cast_tensor<T>(in.ppg_ref_z));
        }
        case LossId::Fm: {
            MsdWeightsT<T> msd = load_msd(cfg, src);
            McdWeightsT<T> mcd = load_mcd(cfg, src);
            DecoderWeightsT<T> dec = load_decoder(cfg, src);
            std::vector<T> ref = cast_vec<T>(in.wave_ref);
            std::vector<T> wave_hat = decode(cast_tensor<T>(in.z), speaker, dec, cfg.stft());
            wave_hat.resize(ref.size(), T(0));
            DiscOutputT<T> real_out = disc_forward_all(ref, msd, mcd);
            DiscOutputT<T> fake_out = disc_forward_all(wave_hat, msd, mcd);
            return fm_loss(real_out, fake_out);
        }
        default:
            throw std::invalid_argument("unknown loss id");
    }
}

}  // namespace

LossId loss_id_from_string(const std::string& s) {
    if (s == "quadratic") return LossId::Quadratic;
    if (s == "recon") return LossId::Recon;
    if (s == "kl") return LossId::Kl;
    if (s == "ppg") return LossId::Ppg;
    if (s == "fm") return LossId::Fm;
    throw std::invalid_argument("loss must be quadratic|recon|kl|ppg|fm, got '" + s + "'");
}

const char* to_string(LossId id) {
    switch (id) {
        case LossId::Quadratic: return "quadratic";
        case LossId::Recon: return "recon";
        case LossId::Kl: return "kl";
        case LossId::Ppg: return "ppg";
        default: return "fm";
    }
}

GradCheckResult directional_grad_check(LossId loss_id, const ModelConfig& cfg,
                                       const WeightStore& store, uint64_t direction_seed,
                                       double eps) {
    if (eps < 1e-5 || eps > 1e-2) {
        throw std::invalid_argument("directional_grad_check: eps must be in [1e-5, 1e-2]");
    }
    const ProbeInputs inputs = make_inputs(cfg);

    // Seeded random unit direction over the whole weight space.
    std::unordered_map<std::string, std::vector<double>> direction;
    double norm2 = 0.0;
    for (const TensorSpec& spec : tensor_inventory(cfg)) {
        Tensor d = rng_fill(spec.shape, tensor_seed(spec.name, direction_seed), Dist::normal(0.0, 1.0));
        std::vector<double> dd(d.data.begin(), d.data.end());
        for (double v : dd) norm2 += v * v;
        direction.emplace(spec.name, std::move(dd));
    }
    const double inv_norm = 1.0 / std::sqrt(norm2);
    for (auto& [name, d] : direction) {
        for (double& v : d) v *= inv_norm;
    }

    WeightSource<Dual<double>> dual_src{&store, &direction, 0.0, true};
    const Dual<double> dual_loss = eval_loss(loss_id, cfg, dual_src, inputs);

    WeightSource<double> plus_src{&store, &direction, eps, false};
    WeightSource<double> minus_src{&store, &direction, -eps, false};
    const double loss_plus = eval_loss(loss_id, cfg, plus_src, inputs);
    const double loss_minus = eval_loss(loss_id, cfg, minus_src, inputs);
    if (!std::isfinite(loss_plus) || !std::isfinite(loss_minus) || !std::isfinite(dual_loss.v)) {
        throw std::runtime_error("directional_grad_check: non-finite loss at perturbed point");
    }

    GradCheckResult r;
    r.ad = dual_loss.t;
    r.fd = (loss_plus - loss_minus) / (2.0 * eps);
    r.rel_err = std::abs(r.ad - r.fd) / std::max({std::abs(r.ad), std::abs(r.fd), 1e-12});
    r.loss = dual_loss.v;
    return r;
}

}  // namespace ppgtts
