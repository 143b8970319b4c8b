// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include "ppgtts/discriminators.hpp"
#include "ppgtts/ppg2wav.hpp"

namespace ppgtts {

struct LossWeights {
    double lambda_recon = 45.0;
    double lambda_ppg = 10.0;
    double lambda_fm = 2.0;
};

// All objective terms plus the composites:
//   L_cvae = L_kl + lambda_recon * L_recon + lambda_ppg * L_ppg
//   L_G    = L_adv_G + lambda_fm * L_fm + L_cvae
//   L_D    = L_adv_D
template <class T>
struct LossReportT {
    T l_ppg{}, l_kl{}, l_recon{}, l_cvae{};
    T l_adv_g{}, l_adv_d{}, l_fm{};
    T l_g{}, l_d{};
};

using LossReport = LossReportT<double>;

// Mean L1 over all elements.
template <class T>
T ppg_loss(const TensorT<T>& ppg_hat, const TensorT<T>& ppg) {
    if (ppg_hat.shape != ppg.shape) throw std::invalid_argument("ppg_loss: shape mismatch");
    using std::abs;
    accum_t<T> acc(0);
    for (size_t i = 0; i < ppg.data.size(); ++i) {
        acc += accum_t<T>(abs(ppg_hat.data[i] - ppg.data[i]));
    }
    return T(acc / accum_t<T>(static_cast<double>(ppg.numel())));
}

// Pointwise log q(z|y) - [log N(fz; mu_p, sigma_p) + log_det/numel], averaged
// over elements. Zero when the densities agree pointwise and the flow is the
// identity.
template <class T>
T kl_loss(const GaussianParamsT<T>& post, const TensorT<T>& z, const TensorT<T>& fz, T log_det,
          const GaussianParamsT<T>& prior) {
    if (post.mu.shape != z.shape || fz.shape != z.shape || prior.mu.shape != z.shape ||
        post.log_sigma.shape != z.shape || prior.log_sigma.shape != z.shape) {
        throw std::invalid_argument("kl_loss: shape mismatch");
    }
    using std::exp;
    const size_t n = z.numel();
    accum_t<T> acc(0);
    for (size_t i = 0; i < n; ++i) {
        // log q(z) = -0.5 log(2 pi) - log_sigma_q - 0.5 ((z - mu_q)/sigma_q)^2
        const T zq = (z.data[i] - post.mu.data[i]) * exp(-post.log_sigma.data[i]);
        const T log_q = T(-0.5 * 1.8378770664093453) - post.log_sigma.data[i] - T(0.5) * zq * zq;
        const T zp = (fz.data[i] - prior.mu.data[i]) * exp(-prior.log_sigma.data[i]);
        const T log_p = T(-0.5 * 1.8378770664093453) - prior.log_sigma.data[i] - T(0.5) * zp * zp;
        acc += accum_t<T>(log_q - log_p);
    }
    return T(acc / accum_t<T>(static_cast<double>(n))) - log_det / T(static_cast<double>(n));
}

// Mean L1 between mel spectrograms; waveforms trimmed to the shorter length.
template <class T>
T recon_loss(const std::vector<T>& wave_hat, const std::vector<T>& wave_ref,
             const StftConfig& cfg, const MelConfig& mel, int sample_rate) {
    if (wave_hat.empty() || wave_ref.empty()) throw std::invalid_argument("recon_loss: empty input");
    const size_t len = std::min(wave_hat.size(), wave_ref.size());
    std::vector<T> a(wave_hat.begin(), wave_hat.begin() + len);
    std::vector<T> b(wave_ref.begin(), wave_ref.begin() + len);
    TensorT<T> ma = mel_spectrogram(a, cfg, mel, sample_rate);
    TensorT<T> mb = mel_spectrogram(b, cfg, mel, sample_rate);
    using std::abs;
    accum_t<T> acc(0);
    for (size_t i = 0; i < ma.data.size(); ++i) acc += accum_t<T>(abs(ma.data[i] - mb.data[i]));
    return T(acc / accum_t<T>(static_cast<double>(ma.numel())));
}

template <class T>
T mean_of(const TensorT<T>& t) {
    accum_t<T> acc(0);
    for (const T& v : t.data) acc += accum_t<T>(v);
    return T(acc / accum_t<T>(static_cast<double>(t.numel())));
}

// Least-squares GAN terms, summed over sub-discriminators:
//   L_adv_D = sum_k mean[(D_k(real) - 1)^2] + mean[D_k(fake)^2]
//   L_adv_G = sum_k mean[(D_k(fake) - 1)^2]
template <class T>
std::pair<T, T> adv_losses(const DiscOutputT<T>& real_out, const DiscOutputT<T>& fake_out) {
    if (real_out.scores.size() != fake_out.scores.size()) {
        throw std::invalid_argument("adv_losses: sub-discriminator count mismatch");
    }
    T g(0), d(0);
    for (size_t k = 0; k < real_out.scores.size(); ++k) {
        const TensorT<T>& sr = real_out.scores[k];
        const TensorT<T>& sf = fake_out.scores[k];
        accum_t<T> dr(0), df(0), gf(0);
        for (const T& v : sr.data) {
            const T e = v - T(1);
            dr += accum_t<T>(e * e);
        }
        for (const T& v : sf.data) {
            df += accum_t<T>(v * v);
            const T e = v - T(1);
            gf += accum_t<T>(e * e);
        }
        d += T(dr / accum_t<T>(static_cast<double>(sr.numel()))) +
             T(df / accum_t<T>(static_cast<double>(sf.numel())));
        g += T(gf / accum_t<T>(static_cast<double>(sf.numel())));
    }
    return {g, d};
}

// Sum over sub-discriminator layers of mean |feat_real - feat_fake|.
template <class T>
T fm_loss(const DiscOutputT<T>& real_out, const DiscOutputT<T>& fake_out) {
    if (real_out.features.size() != fake_out.features.size()) {
        throw std::invalid_argument("fm_loss: feature count mismatch");
    }
    using std::abs;
    T total(0);
    for (size_t k = 0; k < real_out.features.size(); ++k) {
        const TensorT<T>& fr = real_out.features[k];
        const TensorT<T>& ff = fake_out.features[k];
        if (fr.shape != ff.shape) throw std::invalid_argument("fm_loss: feature shape mismatch");
        accum_t<T> acc(0);
        for (size_t i = 0; i < fr.data.size(); ++i) acc += accum_t<T>(abs(fr.data[i] - ff.data[i]));
        total += T(acc / accum_t<T>(static_cast<double>(fr.numel())));
    }
    return total;
}

template <class T>
LossReportT<T> total_losses(T l_kl, T l_recon, T l_ppg, T l_adv_g, T l_adv_d, T l_fm,
                            const LossWeights& w = {}) {
    LossReportT<T> r;
    r.l_kl = l_kl;
    r.l_recon = l_recon;
    r.l_ppg = l_ppg;
    r.l_adv_g = l_adv_g;
    r.l_adv_d = l_adv_d;
    r.l_fm = l_fm;
    r.l_cvae = l_kl + T(w.lambda_recon) * l_recon + T(w.lambda_ppg) * l_ppg;
    r.l_g = l_adv_g + T(w.lambda_fm) * l_fm + r.l_cvae;
    r.l_d = l_adv_d;
    return r;
}

// ------------------------------------------------------- derivative checking

enum class LossId { Quadratic, Recon, Kl, Ppg, Fm };

LossId loss_id_from_string(const std::string& s);
const char* to_string(LossId id);

struct GradCheckResult {
    double ad = 0.0;       // dual-number directional derivative
    double fd = 0.0;       // central finite difference
    double rel_err = 0.0;  // |ad - fd| / max(|ad|, |fd|, 1e-12)
    double loss = 0.0;     // loss at the unperturbed point
};

// Directional derivative of the selected scalar loss along a seeded random
// unit direction in weight space, compared against a central finite
// difference at the given eps. Inputs (reference wave, PPG, latent, noise)
// are fixed deterministic functions of the config.
GradCheckResult directional_grad_check(LossId loss_id, const ModelConfig& cfg,
                                       const WeightStore& store, uint64_t direction_seed,
                                       double eps);

}  // namespace ppgtts
