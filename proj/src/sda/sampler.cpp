// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0

#include "sda/sampler.hpp"

#include <algorithm>

#include "sda/melf.hpp"

namespace sda {

namespace {

std::vector<Tensor<float>> load_normalized(const CorpusManifest& man, const NormStats& stats,
                                           int64_t seg_len) {
  std::vector<Tensor<float>> out;
  out.reserve(man.entries.size());
  for (const auto& e : man.entries) {
    MelSpectrogram mel = read_melf(e.melf_path);
    if (mel.n_frames() == 0) throw UtteranceTooShort(e.melf_path + ": zero frames");
    if (!mel.normalized) mel = normalize(mel, stats);
    const int64_t mels = mel.n_mels();
    if (mel.n_frames() < seg_len) {
      Tensor<float> padded({seg_len, mels});
      for (int64_t t = 0; t < seg_len; ++t) {
        const int64_t src = std::min(t, mel.n_frames() - 1);
        std::copy_n(mel.values.ptr() + src * mels, mels, padded.ptr() + t * mels);
      }
      out.push_back(std::move(padded));
    } else {
      out.push_back(std::move(mel.values));
    }
  }
  return out;
}

}  // namespace

BatchSampler::BatchSampler(const CorpusManifest& a, const CorpusManifest& b,
                           const NormStats& stats, int64_t batch_size, int64_t seg_len,
                           RngStream rng)
    : batch_(batch_size), seg_len_(seg_len), mels_(stats.mean.numel()), rng_(rng) {
  if (a.entries.empty() || b.entries.empty()) throw EmptyCorpus("sampler: empty corpus");
  utts_a_ = load_normalized(a, stats, seg_len);
  utts_b_ = load_normalized(b, stats, seg_len);
}

Tensor<float> BatchSampler::draw_batch(const std::vector<Tensor<float>>& utts) {
  Tensor<float> batch({batch_, 1, seg_len_, mels_});
  for (int64_t i = 0; i < batch_; ++i) {
    const auto& u = utts[static_cast<size_t>(rng_.next_below(utts.size()))];
    const int64_t frames = u.dim(0);
    const int64_t off = static_cast<int64_t>(rng_.next_below(static_cast<uint64_t>(frames - seg_len_ + 1)));
    std::copy_n(u.ptr() + off * mels_, seg_len_ * mels_, batch.ptr() + i * seg_len_ * mels_);
  }
  return batch;
}

std::pair<Tensor<float>, Tensor<float>> BatchSampler::next() {
  Tensor<float> a = draw_batch(utts_a_);
  Tensor<float> b = draw_batch(utts_b_);
  return {std::move(a), std::move(b)};
}

}  // namespace sda
