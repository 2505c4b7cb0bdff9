// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0
//
// MELF binary feature container: magic "MELF", u32 LE version=1,
// u32 LE n_frames, u32 LE n_mels, u8 normalized flag, then
// n_frames x n_mels 32-bit LE floats, frame-major. Round-trips bit-exactly.
// Normalization statistics ride in the same container with n_frames=2
// (row 0 = mean, row 1 = std).

#ifndef SDA_MELF_HPP_
#define SDA_MELF_HPP_

#include <string>

#include "sda/features.hpp"

namespace sda {

struct MelfHeader {
  uint32_t version = 1;
  uint32_t n_frames = 0;
  uint32_t n_mels = 0;
  bool normalized = false;
};

void write_melf(const std::string& path, const MelSpectrogram& mel);
MelfHeader read_melf_header(const std::string& path);
MelSpectrogram read_melf(const std::string& path);

void write_norm_stats(const std::string& path, const NormStats& stats);
NormStats read_norm_stats(const std::string& path);

}  // namespace sda

#endif  // SDA_MELF_HPP_
