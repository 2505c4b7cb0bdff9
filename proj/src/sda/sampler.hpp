// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SDA_SAMPLER_HPP_
#define SDA_SAMPLER_HPP_

#include <utility>
#include <vector>

#include "sda/features.hpp"
#include "sda/manifest.hpp"
#include "sda/rng.hpp"
#include "sda/tensor.hpp"

namespace sda {

// Unpaired two-domain segment sampler: every draw picks an utterance
// uniformly and a random 20-frame crop, independently for each domain.
// Utterances shorter than a segment are right-padded by last-frame
// repetition at load. Batch content is a pure function of the rng state.
class BatchSampler {
 public:
  BatchSampler(const CorpusManifest& a, const CorpusManifest& b, const NormStats& stats,
               int64_t batch_size, int64_t seg_len, RngStream rng);

  // (batch_A, batch_B), each (batch, 1, seg_len, n_mels), normalized.
  std::pair<Tensor<float>, Tensor<float>> next();

  RngStream& rng() { return rng_; }
  int64_t batch_size() const { return batch_; }

 private:
  Tensor<float> draw_batch(const std::vector<Tensor<float>>& utts);

  std::vector<Tensor<float>> utts_a_, utts_b_;  // normalized feature matrices
  int64_t batch_, seg_len_, mels_;
  RngStream rng_;
};

}  // namespace sda

#endif  // SDA_SAMPLER_HPP_
