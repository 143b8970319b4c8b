// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Command-line surface: analyze / synthesize / text2ppg / losses /
// init-weights / selftest. Every command is deterministic given its inputs;
// failures exit nonzero with a single machine-parseable error line.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ppgtts/complexity.hpp"
#include "ppgtts/losses.hpp"
#include "ppgtts/selftest.hpp"
#include "ppgtts/wav_io.hpp"

namespace {

using namespace ppgtts;

ModelConfig config_or_default(const std::string& path) {
    ModelConfig cfg = path.empty() ? ModelConfig{} : load_config_file(path);
    cfg.validate();
    return cfg;
}

Tensor load_named_tensor(const std::string& path, const std::string& name, int expect_cols) {
    WeightStore store = load_weights(path);
    const Tensor& t = store.get(name);
    if (expect_cols > 0 && (t.ndim() != 2 || t.dim(1) != expect_cols)) {
        throw std::runtime_error("tensor '" + name + "' in " + path + " must be [N, " +
                                 std::to_string(expect_cols) + "]");
    }
    return t;
}

int cmd_analyze(const std::string& config_path, const std::string& scope_s, double seconds,
                const std::string& convention_s, bool json) {
    ModelConfig cfg = config_or_default(config_path);
    const Scope scope = scope_s.empty() ? cfg.scope : scope_from_string(scope_s);
    const MacConvention conv = convention_from_string(convention_s);
    ComplexityReport report = count_flops(cfg, seconds, scope, conv);
    std::cout << (json ? report.to_json() : report.to_table()) << std::endl;
    return 0;
}

int cmd_init_weights(const std::string& config_path, uint64_t seed, const std::string& out) {
    ModelConfig cfg = config_or_default(config_path);
    WeightStore store = init_weights(cfg, seed);
    save_weights(store, out);
    std::cout << "wrote " << store.size() << " tensors to " << out << std::endl;
    return 0;
}

int cmd_synthesize(const std::string& config_path, const std::string& weights_path,
                   const std::string& ppg_path, int speaker, float temperature, uint64_t seed,
                   const std::string& out) {
    ModelConfig cfg = config_or_default(config_path);
    WeightStore store = load_weights(weights_path);
    validate_store(store, cfg, Scope::Inference);
    Ppg ppg{load_named_tensor(ppg_path, "ppg", cfg.ppg_dim)};
    Waveform wave = synthesize(ppg, speaker, store, cfg, temperature, seed);
    WavWriteResult res = write_wav(wave, out);
    std::cout << "wrote " << wave.samples.size() << " samples (" << res.bytes << " bytes, "
              << res.clipped << " clipped) to " << out << std::endl;
    return 0;
}

int cmd_text2ppg(const std::string& config_path, const std::string& weights_path,
                 const std::string& phoneme_path, const std::string& out) {
    ModelConfig cfg = config_or_default(config_path);
    WeightStore store = load_weights(weights_path);
    validate_store(store, cfg, Scope::Inference);

    WeightStore in = load_weights(phoneme_path);
    const Tensor& ids_t = in.get("phoneme_ids");
    PhonemeSequence seq;
    for (float v : ids_t.data) {
        const int id = static_cast<int>(std::lround(v));
        if (std::abs(v - id) > 1e-3f) throw std::runtime_error("phoneme_ids must hold integers");
        seq.ids.push_back(id);
    }

    auto w = load_text2ppg(cfg, float_source(store));
    auto result = text2ppg_forward(seq, w);

    WeightStore out_store;
    out_store.insert("ppg", result.ppg);
    Tensor durations({static_cast<int>(result.durations.size())});
    for (size_t i = 0; i < result.durations.size(); ++i) {
        durations.data[i] = static_cast<float>(result.durations[i]);
    }
    out_store.insert("durations", durations);
    save_weights(out_store, out);
    std::cout << "wrote ppg [" << result.ppg.dim(0) << ", " << result.ppg.dim(1) << "] to " << out
              << std::endl;
    return 0;
}

int cmd_losses(const std::string& config_path, const std::string& weights_path,
               const std::string& wav_path, const std::string& ppg_path, int speaker,
               uint64_t seed, bool json) {
    ModelConfig cfg = config_or_default(config_path);
    WeightStore store = load_weights(weights_path);
    validate_store(store, cfg, Scope::Training);
    auto src = float_source(store);

    Waveform ref = read_wav(wav_path);
    if (ref.sample_rate != cfg.sample_rate) {
        throw std::runtime_error("wav sample rate " + std::to_string(ref.sample_rate) +
                                 " does not match config " + std::to_string(cfg.sample_rate));
    }
    Tensor ppg_all = load_named_tensor(ppg_path, "ppg", cfg.ppg_dim);

    // align frame counts: posterior frames come from the wave, prior frames
    // from the PPG; trim both to the shorter
    Tensor linspec = linear_spectrogram(ref.samples, cfg.stft());
    const int n = std::min(linspec.dim(1), ppg_all.dim(0));
    if (n < 1) throw std::runtime_error("inputs too short");
    Tensor lin_trim({linspec.dim(0), n});
    for (int b = 0; b < linspec.dim(0); ++b) {
        for (int t = 0; t < n; ++t) lin_trim.at(b, t) = linspec.at(b, t);
    }
    Tensor ppg({n, cfg.ppg_dim});
    for (int t = 0; t < n; ++t) {
        for (int c = 0; c < cfg.ppg_dim; ++c) ppg.at(t, c) = ppg_all.at(t, c);
    }

    auto post_w = load_posterior(cfg, src);
    auto prior_w = load_prior(cfg, src);
    auto flow_w = load_flow(cfg, src);
    auto dec_w = load_decoder(cfg, src);
    auto pred_w = load_ppg_predictor(cfg, src);
    auto msd_w = load_msd(cfg, src);
    auto mcd_w = load_mcd(cfg, src);
    std::vector<float> spk = load_speaker_row(cfg, src, speaker);

    Rng rng(seed);
    auto post = posterior_encode(lin_trim, post_w, &rng);
    auto flow = flow_forward(post.z, static_cast<const std::vector<float>*>(nullptr), flow_w);
    auto prior = prior_encode(ppg, spk, prior_w);
    const float l_kl = kl_loss(post.post, post.z, flow.z, flow.log_det, prior);

    Tensor ppg_hat = ppg_predict(post.z, pred_w);
    const float l_ppg = ppg_loss(ppg_hat, ppg);

    std::vector<float> wave_hat = decode(post.z, spk, dec_w, cfg.stft());
    const float l_recon = recon_loss(wave_hat, ref.samples, cfg.stft(), cfg.mel(), cfg.sample_rate);

    const size_t seg = std::min(wave_hat.size(), ref.samples.size());
    std::vector<float> real_seg(ref.samples.begin(), ref.samples.begin() + seg);
    std::vector<float> fake_seg(wave_hat.begin(), wave_hat.begin() + seg);
    DiscOutput real_out = disc_forward_all(real_seg, msd_w, mcd_w);
    DiscOutput fake_out = disc_forward_all(fake_seg, msd_w, mcd_w);
    auto [l_adv_g, l_adv_d] = adv_losses(real_out, fake_out);
    const float l_fm = fm_loss(real_out, fake_out);

    LossReportT<double> r = total_losses<double>(l_kl, l_recon, l_ppg, l_adv_g, l_adv_d, l_fm);
    if (json) {
        nlohmann::json j;
        j["l_ppg"] = r.l_ppg;
        j["l_kl"] = r.l_kl;
        j["l_recon"] = r.l_recon;
        j["l_cvae"] = r.l_cvae;
        j["l_adv_g"] = r.l_adv_g;
        j["l_adv_d"] = r.l_adv_d;
        j["l_fm"] = r.l_fm;
        j["l_g"] = r.l_g;
        j["l_d"] = r.l_d;
        j["frames"] = n;
        std::cout << j.dump(2) << std::endl;
    } else {
        char line[256];
        std::snprintf(line, sizeof(line),
                      "L_ppg=%.6f L_kl=%.6f L_recon=%.6f L_cvae=%.6f\n"
                      "L_adv_G=%.6f L_adv_D=%.6f L_fm=%.6f\n"
                      "L_G=%.6f L_D=%.6f (frames=%d)",
                      r.l_ppg, r.l_kl, r.l_recon, r.l_cvae, r.l_adv_g, r.l_adv_d, r.l_fm, r.l_g,
                      r.l_d, n);
        std::cout << line << std::endl;
    }
    return 0;
}

int cmd_selftest(const std::string& filter) {
    const auto results = run_selftests(filter);
    int failed = 0;
    for (const auto& r : results) {
        std::cout << (r.passed ? "PASS" : "FAIL") << "  " << r.name;
        if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
        std::cout << "\n";
        if (!r.passed) ++failed;
    }
    std::cout << results.size() - failed << "/" << results.size() << " checks passed" << std::endl;
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ppgtts: lightweight PPG-conditioned TTS core and complexity analyzer"};
    app.require_subcommand(1);

    std::string config_path, weights_path, ppg_path, wav_path, phoneme_path, out_path;
    std::string scope_s, convention_s = "mac2", filter;
    double seconds = 1.0;
    float temperature = 1.0f;
    uint64_t seed = 0;
    int speaker = 0;
    bool json = false;

    auto* analyze = app.add_subcommand("analyze", "parameter and FLOP accounting");
    analyze->add_option("--config", config_path, "config file (defaults built in)");
    analyze->add_option("--scope", scope_s, "inference|training|all");
    analyze->add_option("--seconds", seconds, "synthesized duration for FLOP counts");
    analyze->add_option("--convention", convention_s, "mac2|mac1");
    analyze->add_flag("--json", json, "emit JSON");

    auto* synth = app.add_subcommand("synthesize", "PPG + speaker id -> waveform");
    synth->add_option("--config", config_path);
    synth->add_option("--weights", weights_path)->required();
    synth->add_option("--ppg", ppg_path)->required();
    synth->add_option("--speaker", speaker)->required();
    synth->add_option("--temperature", temperature);
    synth->add_option("--seed", seed);
    synth->add_option("--out", out_path)->required();

    auto* t2p = app.add_subcommand("text2ppg", "phoneme ids -> PPG");
    t2p->add_option("--config", config_path);
    t2p->add_option("--weights", weights_path)->required();
    t2p->add_option("--phonemes", phoneme_path)->required();
    t2p->add_option("--out", out_path)->required();

    auto* losses = app.add_subcommand("losses", "forward-only objective evaluation");
    losses->add_option("--config", config_path);
    losses->add_option("--weights", weights_path)->required();
    losses->add_option("--wav", wav_path)->required();
    losses->add_option("--ppg", ppg_path)->required();
    losses->add_option("--speaker", speaker)->required();
    losses->add_option("--seed", seed);
    losses->add_flag("--json", json);

    auto* init = app.add_subcommand("init-weights", "seeded random weight store");
    init->add_option("--config", config_path);
    init->add_option("--seed", seed)->required();
    init->add_option("--out", out_path)->required();

    auto* self = app.add_subcommand("selftest", "run the invariant suites");
    self->add_option("--filter", filter, "substring filter on check names");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return cmd_analyze(config_path, scope_s, seconds, convention_s, json);
        if (synth->parsed())
            return cmd_synthesize(config_path, weights_path, ppg_path, speaker, temperature, seed, out_path);
        if (t2p->parsed()) return cmd_text2ppg(config_path, weights_path, phoneme_path, out_path);
        if (losses->parsed())
            return cmd_losses(config_path, weights_path, wav_path, ppg_path, speaker, seed, json);
        if (init->parsed()) return cmd_init_weights(config_path, seed, out_path);
        if (self->parsed()) return cmd_selftest(filter);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
