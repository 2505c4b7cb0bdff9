// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0

#include "sda/features.hpp"

#include <algorithm>
#include <cmath>

#include "sda/fft.hpp"

namespace sda {

namespace {

// Mel scale with a linear region below 1 kHz and logarithmic spacing above
// (the Slaney variant). Keeps filter peak bins strictly increasing at
// 80 mels over a 512-point FFT, which the HTK curve does not.
constexpr double kMelBreakHz = 1000.0;
constexpr double kMelBreak = 15.0;   // 3 * 1000 / 200
constexpr double kMelLogStep = 27.0;

double hz_to_mel(double f) {
  if (f < kMelBreakHz) return 3.0 * f / 200.0;
  return kMelBreak + kMelLogStep * std::log(f / kMelBreakHz) / std::log(6.4);
}

double mel_to_hz(double m) {
  if (m < kMelBreak) return 200.0 * m / 3.0;
  return kMelBreakHz * std::exp(std::log(6.4) * (m - kMelBreak) / kMelLogStep);
}

std::vector<double> mel_points(const MelConfig& cfg) {
  std::vector<double> pts(static_cast<size_t>(cfg.n_mels) + 2);
  const double lo = hz_to_mel(cfg.f_min), hi = hz_to_mel(cfg.f_max);
  for (size_t i = 0; i < pts.size(); ++i)
    pts[i] = mel_to_hz(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cfg.n_mels + 1));
  return pts;
}

}  // namespace

void MelConfig::validate() const {
  if (sample_rate <= 0) throw InvalidConfig("sample_rate must be positive");
  if (win_length <= 0 || hop_length <= 0) throw InvalidConfig("window/hop must be positive");
  if (win_length > fft_size) throw InvalidConfig("win_length must be <= fft_size");
  if (n_mels < 1) throw InvalidConfig("n_mels must be >= 1");
  if (!(f_min < f_max) || f_max > sample_rate / 2.0)
    throw InvalidConfig("need f_min < f_max <= sample_rate/2");
  if (log_floor <= 0.0) throw InvalidConfig("log_floor must be positive");
}

int64_t MelConfig::n_frames(int64_t n_samples) const {
  return 1 + (n_samples - win_length) / hop_length;
}

Tensor<float> stft_power(const AudioClip& clip, const MelConfig& cfg) {
  cfg.validate();
  if (clip.sample_rate != cfg.sample_rate)
    throw SampleRateMismatch("clip at " + std::to_string(clip.sample_rate) + " Hz, config wants " +
                             std::to_string(cfg.sample_rate));
  const int64_t n = static_cast<int64_t>(clip.samples.size());
  if (n < cfg.win_length)
    throw AudioTooShort("clip of " + std::to_string(n) + " samples, window is " +
                        std::to_string(cfg.win_length));
  const int64_t frames = cfg.n_frames(n);
  const int64_t bins = cfg.n_bins();

  std::vector<double> window(static_cast<size_t>(cfg.win_length));
  for (int64_t i = 0; i < cfg.win_length; ++i)
    window[static_cast<size_t>(i)] =
        0.54 - 0.46 * std::cos(2.0 * M_PI * static_cast<double>(i) /
                               static_cast<double>(cfg.win_length - 1));

  Tensor<float> out({frames, bins});
  std::vector<double> frame(static_cast<size_t>(cfg.win_length));
  std::vector<double> power(static_cast<size_t>(bins));
  for (int64_t f = 0; f < frames; ++f) {
    const float* src = clip.samples.data() + f * cfg.hop_length;
    for (int64_t i = 0; i < cfg.win_length; ++i)
      frame[static_cast<size_t>(i)] = static_cast<double>(src[i]) * window[static_cast<size_t>(i)];
    power_spectrum(frame.data(), cfg.win_length, cfg.fft_size, power.data());
    for (int64_t k = 0; k < bins; ++k)
      out[f * bins + k] = static_cast<float>(power[static_cast<size_t>(k)]);
  }
  return out;
}

Tensor<float> mel_filterbank(const MelConfig& cfg) {
  cfg.validate();
  const auto pts = mel_points(cfg);
  const int64_t bins = cfg.n_bins();
  Tensor<float> fb({cfg.n_mels, bins});
  for (int64_t m = 0; m < cfg.n_mels; ++m) {
    const double lo = pts[static_cast<size_t>(m)], ce = pts[static_cast<size_t>(m) + 1],
                 hi = pts[static_cast<size_t>(m) + 2];
    for (int64_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * cfg.sample_rate / cfg.fft_size;
      const double up = (f - lo) / (ce - lo);
      const double down = (hi - f) / (hi - ce);
      fb[m * bins + k] = static_cast<float>(std::max(0.0, std::min(up, down)));
    }
  }
  return fb;
}

std::vector<double> mel_peak_frequencies(const MelConfig& cfg) {
  const auto pts = mel_points(cfg);
  return std::vector<double>(pts.begin() + 1, pts.end() - 1);
}

MelSpectrogram log_mel(const Tensor<float>& power, const Tensor<float>& fb, const MelConfig& cfg) {
  if (power.rank() != 2 || fb.rank() != 2 || power.dim(1) != fb.dim(1))
    throw ShapeMismatch("log_mel: power " + power.shape_str() + " vs filterbank " + fb.shape_str());
  const int64_t frames = power.dim(0), bins = power.dim(1), mels = fb.dim(0);
  MelSpectrogram out;
  out.values = Tensor<float>({frames, mels});
  for (int64_t f = 0; f < frames; ++f)
    for (int64_t m = 0; m < mels; ++m) {
      double acc = 0.0;
      const float* p = power.ptr() + f * bins;
      const float* w = fb.ptr() + m * bins;
      for (int64_t k = 0; k < bins; ++k) acc += static_cast<double>(p[k]) * w[k];
      out.values[f * mels + m] = static_cast<float>(std::log(std::max(acc, cfg.log_floor)));
    }
  return out;
}

MelSpectrogram compute_log_mel(const AudioClip& clip, const MelConfig& cfg) {
  return log_mel(stft_power(clip, cfg), mel_filterbank(cfg), cfg);
}

std::vector<Tensor<float>> segment(const MelSpectrogram& mel, int64_t seg_len, int64_t hop,
                                   SegmentLayout* layout) {
  if (mel.n_frames() < 1) throw EmptySpectrogram("segment: empty spectrogram");
  if (seg_len < 1 || hop < 1) throw InvalidConfig("segment: seg_len and hop must be >= 1");
  const int64_t frames = mel.n_frames(), mels = mel.n_mels();
  const int64_t n_segments = frames <= seg_len ? 1 : 1 + (frames - seg_len + hop - 1) / hop;
  const int64_t covered = (n_segments - 1) * hop + seg_len;
  SegmentLayout lay{frames, seg_len, hop, n_segments, covered - frames};
  std::vector<Tensor<float>> out;
  out.reserve(static_cast<size_t>(n_segments));
  for (int64_t s = 0; s < n_segments; ++s) {
    Tensor<float> seg({seg_len, mels});
    const int64_t off = s * hop;
    for (int64_t t = 0; t < seg_len; ++t) {
      const int64_t src = std::min(off + t, frames - 1);  // repeat last frame into padding
      std::copy_n(mel.values.ptr() + src * mels, mels, seg.ptr() + t * mels);
    }
    out.push_back(std::move(seg));
  }
  if (layout) *layout = lay;
  return out;
}

MelSpectrogram stitch(const std::vector<Tensor<float>>& segments, const SegmentLayout& layout) {
  if (static_cast<int64_t>(segments.size()) != layout.n_segments)
    throw LayoutMismatch("stitch: " + std::to_string(segments.size()) + " segments for layout of " +
                         std::to_string(layout.n_segments));
  if (segments.empty()) throw LayoutMismatch("stitch: no segments");
  const int64_t mels = segments[0].dim(1);
  for (const auto& s : segments)
    if (s.shape != std::vector<int64_t>{layout.seg_len, mels})
      throw LayoutMismatch("stitch: segment shape " + s.shape_str());

  Tensor<double> acc({layout.n_frames, mels});
  std::vector<int32_t> counts(static_cast<size_t>(layout.n_frames), 0);
  for (int64_t s = 0; s < layout.n_segments; ++s) {
    const int64_t off = s * layout.hop;
    for (int64_t t = 0; t < layout.seg_len; ++t) {
      const int64_t dst = off + t;
      if (dst >= layout.n_frames) break;  // padding
      for (int64_t m = 0; m < mels; ++m)
        acc[dst * mels + m] += static_cast<double>(segments[static_cast<size_t>(s)][t * mels + m]);
      counts[static_cast<size_t>(dst)]++;
    }
  }
  MelSpectrogram out;
  out.values = Tensor<float>({layout.n_frames, mels});
  for (int64_t f = 0; f < layout.n_frames; ++f) {
    if (counts[static_cast<size_t>(f)] == 0) throw LayoutMismatch("stitch: uncovered frame");
    for (int64_t m = 0; m < mels; ++m)
      out.values[f * mels + m] =
          static_cast<float>(acc[f * mels + m] / counts[static_cast<size_t>(f)]);
  }
  return out;
}

void NormAccumulator::add(const MelSpectrogram& mel) {
  const int64_t mels = mel.n_mels();
  if (sum_.empty()) {
    sum_.assign(static_cast<size_t>(mels), 0.0);
    sum_sq_.assign(static_cast<size_t>(mels), 0.0);
  } else if (static_cast<int64_t>(sum_.size()) != mels) {
    throw ShapeMismatch("norm stats: inconsistent n_mels");
  }
  for (int64_t f = 0; f < mel.n_frames(); ++f)
    for (int64_t m = 0; m < mels; ++m) {
      const double v = mel.values[f * mels + m];
      sum_[static_cast<size_t>(m)] += v;
      sum_sq_[static_cast<size_t>(m)] += v * v;
    }
  n_frames_ += mel.n_frames();
}

NormStats NormAccumulator::finalize() const {
  if (n_frames_ == 0) throw EmptyCorpus("norm stats over an empty corpus");
  const int64_t mels = static_cast<int64_t>(sum_.size());
  NormStats st;
  st.mean = Tensor<float>({mels});
  st.std = Tensor<float>({mels});
  for (int64_t m = 0; m < mels; ++m) {
    const double mu = sum_[static_cast<size_t>(m)] / static_cast<double>(n_frames_);
    const double var =
        std::max(0.0, sum_sq_[static_cast<size_t>(m)] / static_cast<double>(n_frames_) - mu * mu);
    st.mean[m] = static_cast<float>(mu);
    st.std[m] = static_cast<float>(std::max(std::sqrt(var), 1e-8));
  }
  return st;
}

NormStats compute_norm_stats(const std::vector<MelSpectrogram>& corpus) {
  NormAccumulator acc;
  for (const auto& mel : corpus) acc.add(mel);
  return acc.finalize();
}

MelSpectrogram normalize(const MelSpectrogram& mel, const NormStats& stats) {
  const int64_t mels = mel.n_mels();
  if (stats.mean.numel() != mels)
    throw ShapeMismatch("normalize: stats for " + std::to_string(stats.mean.numel()) + " bins");
  MelSpectrogram out;
  out.values = Tensor<float>(mel.values.shape);
  out.normalized = true;
  for (int64_t f = 0; f < mel.n_frames(); ++f)
    for (int64_t m = 0; m < mels; ++m)
      out.values[f * mels + m] = (mel.values[f * mels + m] - stats.mean[m]) / stats.std[m];
  return out;
}

MelSpectrogram denormalize(const MelSpectrogram& mel, const NormStats& stats) {
  const int64_t mels = mel.n_mels();
  if (stats.mean.numel() != mels)
    throw ShapeMismatch("denormalize: stats for " + std::to_string(stats.mean.numel()) + " bins");
  MelSpectrogram out;
  out.values = Tensor<float>(mel.values.shape);
  out.normalized = false;
  for (int64_t f = 0; f < mel.n_frames(); ++f)
    for (int64_t m = 0; m < mels; ++m)
      out.values[f * mels + m] = mel.values[f * mels + m] * stats.std[m] + stats.mean[m];
  return out;
}

}  // namespace sda
