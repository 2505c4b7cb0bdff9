// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0

#include "sda/toygen.hpp"

#include <cmath>
#include <complex>
#include <filesystem>

#include "sda/fft.hpp"
#include "sda/manifest.hpp"
#include "sda/melf.hpp"

namespace fs = std::filesystem;

namespace sda {

void ToyConfig::validate(const MelConfig& mel) const {
  if (n_train_utts < 1) throw InvalidConfig("toy: need at least one training utterance");
  if (duration_s * mel.sample_rate < mel.win_length) throw InvalidConfig("toy: utterance too short");
  if (!(f0_min > 0 && f0_min <= f0_max)) throw InvalidConfig("toy: bad f0 range");
  if (!(noise_lo < noise_hi && noise_hi <= mel.sample_rate / 2.0))
    throw InvalidConfig("toy: noise band must lie within Nyquist");
  if (n_harmonics < 1) throw InvalidConfig("toy: n_harmonics must be >= 1");
}

AudioClip toy_harmonic_utterance(const ToyConfig& cfg, const MelConfig& mel, RngStream& rng) {
  const int64_t n = static_cast<int64_t>(cfg.duration_s * mel.sample_rate);
  const double f0 = cfg.f0_min + rng.next_double() * (cfg.f0_max - cfg.f0_min);
  std::vector<double> phase(static_cast<size_t>(cfg.n_harmonics));
  for (auto& p : phase) p = rng.next_double() * 2.0 * M_PI;

  AudioClip clip;
  clip.sample_rate = mel.sample_rate;
  clip.samples.resize(static_cast<size_t>(n));
  double energy = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / mel.sample_rate;
    double v = 0.0;
    for (int k = 1; k <= cfg.n_harmonics; ++k)
      v += std::sin(2.0 * M_PI * k * f0 * t + phase[static_cast<size_t>(k - 1)]) / k;
    clip.samples[static_cast<size_t>(i)] = static_cast<float>(v);
    energy += v * v;
  }
  const double rms = std::sqrt(energy / static_cast<double>(n));
  const float gain = static_cast<float>(0.1 / (rms + 1e-12));
  for (auto& s : clip.samples) s *= gain;
  return clip;
}

std::vector<float> toy_band_noise(const ToyConfig& cfg, const MelConfig& mel,
                                  const std::vector<float>& reference, RngStream& rng) {
  const int64_t n = static_cast<int64_t>(reference.size());
  int64_t nfft = 1;
  while (nfft < n) nfft <<= 1;

  // White Gaussian noise, masked to the band in the frequency domain.
  std::vector<std::complex<double>> spec(static_cast<size_t>(nfft));
  for (auto& c : spec) c = rng.next_gauss();
  fft_radix2(spec);
  for (int64_t k = 0; k < nfft; ++k) {
    const int64_t kk = k <= nfft / 2 ? k : nfft - k;
    const double f = static_cast<double>(kk) * mel.sample_rate / static_cast<double>(nfft);
    if (f < cfg.noise_lo || f > cfg.noise_hi) spec[static_cast<size_t>(k)] = 0.0;
  }
  // Inverse FFT via conjugation.
  for (auto& c : spec) c = std::conj(c);
  fft_radix2(spec);
  std::vector<float> noise(static_cast<size_t>(n));
  double p_noise = 0.0, p_sig = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    const double v = spec[static_cast<size_t>(i)].real() / static_cast<double>(nfft);
    noise[static_cast<size_t>(i)] = static_cast<float>(v);
    p_noise += v * v;
    p_sig += static_cast<double>(reference[static_cast<size_t>(i)]) * reference[static_cast<size_t>(i)];
  }
  const double gain = std::sqrt(p_sig / (p_noise * std::pow(10.0, cfg.snr_db / 10.0) + 1e-300));
  for (auto& v : noise) v = static_cast<float>(v * gain);
  return noise;
}

ToyCorpusPaths generate_toy_corpus(const ToyConfig& cfg, const MelConfig& mel,
                                   const std::string& out_dir) {
  cfg.validate(mel);
  const fs::path root(out_dir);
  std::error_code ec;
  fs::create_directories(root / "a_train", ec);
  fs::create_directories(root / "b_train", ec);
  fs::create_directories(root / "eval", ec);
  if (ec) throw IoError("cannot create toy corpus directories under " + out_dir);

  const Tensor<float> fb = mel_filterbank(mel);
  RngStream master(cfg.seed);
  RngStream gen = master.split("toygen");

  auto render = [&](const AudioClip& clip, const fs::path& path) {
    write_melf(path.string(), log_mel(stft_power(clip, mel), fb, mel));
  };
  auto pad4 = [](int64_t i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%04d", static_cast<int>(i));
    return std::string(buf);
  };

  std::vector<ManifestEntry> man_a, man_b, man_eval;
  for (int64_t i = 0; i < cfg.n_train_utts; ++i) {
    RngStream r = gen.split("a." + std::to_string(i));
    const fs::path p = root / "a_train" / ("a_" + pad4(i) + ".melf");
    render(toy_harmonic_utterance(cfg, mel, r), p);
    man_a.push_back({"a_" + pad4(i), fs::relative(p, root).string(), ""});
  }
  for (int64_t i = 0; i < cfg.n_train_utts; ++i) {
    RngStream r = gen.split("b." + std::to_string(i));
    AudioClip clip = toy_harmonic_utterance(cfg, mel, r);
    const std::vector<float> noise = toy_band_noise(cfg, mel, clip.samples, r);
    for (size_t s = 0; s < clip.samples.size(); ++s) clip.samples[s] += noise[s];
    const fs::path p = root / "b_train" / ("b_" + pad4(i) + ".melf");
    render(clip, p);
    man_b.push_back({"b_" + pad4(i), fs::relative(p, root).string(), ""});
  }
  for (int64_t i = 0; i < cfg.n_eval_utts; ++i) {
    RngStream r = gen.split("eval." + std::to_string(i));
    AudioClip clean = toy_harmonic_utterance(cfg, mel, r);
    AudioClip noisy = clean;
    const std::vector<float> noise = toy_band_noise(cfg, mel, clean.samples, r);
    for (size_t s = 0; s < noisy.samples.size(); ++s) noisy.samples[s] += noise[s];
    const fs::path pn = root / "eval" / ("e_" + pad4(i) + "_noisy.melf");
    const fs::path pc = root / "eval" / ("e_" + pad4(i) + "_clean.melf");
    render(noisy, pn);
    render(clean, pc);
    man_eval.push_back(
        {"e_" + pad4(i), fs::relative(pn, root).string(), fs::relative(pc, root).string()});
  }

  ToyCorpusPaths out;
  out.manifest_a = (root / "train_a.tsv").string();
  out.manifest_b = (root / "train_b.tsv").string();
  write_manifest(out.manifest_a, man_a);
  write_manifest(out.manifest_b, man_b);
  if (!man_eval.empty()) {
    out.manifest_eval = (root / "eval_pairs.tsv").string();
    write_manifest(out.manifest_eval, man_eval);
  }
  return out;
}

std::vector<int64_t> band_to_bins(double lo_hz, double hi_hz, const MelConfig& cfg) {
  if (!(lo_hz <= hi_hz) || lo_hz < cfg.f_min || hi_hz > cfg.f_max)
    throw InvalidConfig("band_to_bins: band outside [f_min, f_max]");
  const auto peaks = mel_peak_frequencies(cfg);
  std::vector<int64_t> bins;
  for (size_t i = 0; i < peaks.size(); ++i)
    if (peaks[i] >= lo_hz && peaks[i] <= hi_hz) bins.push_back(static_cast<int64_t>(i));
  if (bins.empty()) throw EmptyBand("band_to_bins: no filter peak inside band");
  return bins;
}

}  // namespace sda
