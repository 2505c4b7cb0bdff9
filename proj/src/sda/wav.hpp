// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SDA_WAV_HPP_
#define SDA_WAV_HPP_

#include <string>

#include "sda/features.hpp"

namespace sda {

// Reads a PCM 16-bit little-endian WAV. Stereo is downmixed by channel
// average; other channel counts or encodings are rejected.
AudioClip read_wav(const std::string& path);

// As read_wav, followed by windowed-sinc resampling when the file's rate
// differs from target_rate.
AudioClip read_wav_resampled(const std::string& path, int target_rate);

void write_wav(const std::string& path, const AudioClip& clip);

// Windowed-sinc (Hann, 32 taps per side) arbitrary-ratio resampler with
// anti-alias cutoff at the lower Nyquist.
AudioClip resample(const AudioClip& clip, int target_rate);

}  // namespace sda

#endif  // SDA_WAV_HPP_
