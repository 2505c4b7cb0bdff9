// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Log-mel feature pipeline: Hamming-windowed STFT power, triangular mel
// filterbank, natural-log compression, fixed-length segmentation with exact
// stitching, and per-bin corpus standardization.

#ifndef SDA_FEATURES_HPP_
#define SDA_FEATURES_HPP_

#include <cstdint>
#include <vector>

#include "sda/common.hpp"
#include "sda/tensor.hpp"

namespace sda {

struct AudioClip {
  std::vector<float> samples;  // in [-1, 1]
  int sample_rate = 16000;
};

struct MelConfig {
  int sample_rate = 16000;
  int win_length = 400;   // 25 ms
  int hop_length = 160;   // 10 ms
  int fft_size = 512;
  int n_mels = 80;
  double f_min = 0.0;
  double f_max = 8000.0;
  double log_floor = 1e-5;

  void validate() const;
  int64_t n_bins() const { return fft_size / 2 + 1; }
  // 1 + floor((len - win) / hop); requires len >= win.
  int64_t n_frames(int64_t n_samples) const;
};

struct MelSpectrogram {
  Tensor<float> values;  // (n_frames, n_mels)
  bool normalized = false;
  int64_t n_frames() const { return values.rank() == 2 ? values.dim(0) : 0; }
  int64_t n_mels() const { return values.rank() == 2 ? values.dim(1) : 0; }
};

// Per-mel-bin standardization statistics over a training corpus.
struct NormStats {
  Tensor<float> mean;  // (n_mels)
  Tensor<float> std;   // (n_mels), floored at 1e-8
};

struct SegmentLayout {
  int64_t n_frames = 0;
  int64_t seg_len = 20;
  int64_t hop = 20;
  int64_t n_segments = 0;
  int64_t pad = 0;  // trailing frames of the last segment repeating the final frame
};

// Squared-magnitude Hamming-windowed STFT, (n_frames, fft_size/2+1).
Tensor<float> stft_power(const AudioClip& clip, const MelConfig& cfg);

// Triangular filters equally spaced on the mel scale, (n_mels, fft_size/2+1).
Tensor<float> mel_filterbank(const MelConfig& cfg);

// Peak (center) frequency in Hz of each filter.
std::vector<double> mel_peak_frequencies(const MelConfig& cfg);

// ln(max(fb . power^T, log_floor)), (n_frames, n_mels).
MelSpectrogram log_mel(const Tensor<float>& power, const Tensor<float>& fb, const MelConfig& cfg);

// The full pipeline for one clip.
MelSpectrogram compute_log_mel(const AudioClip& clip, const MelConfig& cfg);

// Cuts into seg_len-frame segments at the given hop; the final segment is
// right-padded by repeating the last frame. Covers every frame.
std::vector<Tensor<float>> segment(const MelSpectrogram& mel, int64_t seg_len, int64_t hop,
                                   SegmentLayout* layout);

// Inverse of segment: overlapping regions averaged with equal weights,
// padding discarded. Exact (bitwise) when hop == seg_len.
MelSpectrogram stitch(const std::vector<Tensor<float>>& segments, const SegmentLayout& layout);

// Streaming accumulator so corpora never need to fit in memory.
class NormAccumulator {
 public:
  void add(const MelSpectrogram& mel);
  NormStats finalize() const;  // throws EmptyCorpus if nothing was added
 private:
  std::vector<double> sum_, sum_sq_;
  int64_t n_frames_ = 0;
};

NormStats compute_norm_stats(const std::vector<MelSpectrogram>& corpus);

MelSpectrogram normalize(const MelSpectrogram& mel, const NormStats& stats);
MelSpectrogram denormalize(const MelSpectrogram& mel, const NormStats& stats);

}  // namespace sda

#endif  // SDA_FEATURES_HPP_
