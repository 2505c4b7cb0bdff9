// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic two-domain toy corpus for desk-scale verification of
// noisy-to-clean adaptation. Domain A holds harmonic tones; domain B holds
// independently drawn harmonic tones plus band-limited Gaussian noise. A
// held-out eval set keeps, for each noisy utterance, its exact noise-free
// counterpart (same f0 and phases), which training never sees.

#ifndef SDA_TOYGEN_HPP_
#define SDA_TOYGEN_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "sda/features.hpp"
#include "sda/rng.hpp"

namespace sda {

struct ToyConfig {
  int64_t n_train_utts = 200;  // per domain
  int64_t n_eval_utts = 50;
  double duration_s = 1.0;
  double f0_min = 100.0, f0_max = 300.0;
  int n_harmonics = 8;
  double noise_lo = 2000.0, noise_hi = 6000.0;  // Hz
  double snr_db = 0.0;
  uint64_t seed = 0;

  void validate(const MelConfig& mel) const;
};

struct ToyCorpusPaths {
  std::string manifest_a;     // clean training manifest
  std::string manifest_b;     // noisy training manifest
  std::string manifest_eval;  // paired eval manifest ("" when n_eval_utts == 0)
};

// Renders the corpus through the feature pipeline into MELF files under
// out_dir and writes the three manifests.
ToyCorpusPaths generate_toy_corpus(const ToyConfig& cfg, const MelConfig& mel,
                                   const std::string& out_dir);

// Indices of mel filters whose peak frequency lies inside [lo_hz, hi_hz].
std::vector<int64_t> band_to_bins(double lo_hz, double hi_hz, const MelConfig& cfg);

// Single harmonic utterance: n_harmonics partials with 1/k amplitude decay
// and random phases, RMS-normalized. Exposed for tests.
AudioClip toy_harmonic_utterance(const ToyConfig& cfg, const MelConfig& mel, RngStream& rng);

// Band-limited Gaussian noise scaled so that signal_power/noise_power
// matches snr_db against `reference`.
std::vector<float> toy_band_noise(const ToyConfig& cfg, const MelConfig& mel,
                                  const std::vector<float>& reference, RngStream& rng);

}  // namespace sda

#endif  // SDA_TOYGEN_HPP_
