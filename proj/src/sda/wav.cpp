// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0

#include "sda/wav.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace sda {

namespace {

uint32_t rd_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t rd_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<char*>(b), 4);
}
void wr_u16(std::ostream& os, uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  os.write(reinterpret_cast<char*>(b), 2);
}

}  // namespace

AudioClip read_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw MissingFile("cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw ParseError(path + ": not a RIFF/WAVE file");

  int channels = 0, rate = 0, bits = 0, fmt = 0;
  size_t data_off = 0, data_len = 0;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint32_t len = rd_u32(bytes.data() + pos + 4);
    if (std::memcmp(bytes.data() + pos, "fmt ", 4) == 0 && pos + 8 + 16 <= bytes.size()) {
      const unsigned char* p = bytes.data() + pos + 8;
      fmt = rd_u16(p);
      channels = rd_u16(p + 2);
      rate = static_cast<int>(rd_u32(p + 4));
      bits = rd_u16(p + 14);
    } else if (std::memcmp(bytes.data() + pos, "data", 4) == 0) {
      data_off = pos + 8;
      data_len = std::min<size_t>(len, bytes.size() - data_off);
    }
    pos += 8 + len + (len & 1);
  }
  if (fmt != 1 || bits != 16)
    throw ParseError(path + ": only PCM 16-bit supported (fmt=" + std::to_string(fmt) +
                     ", bits=" + std::to_string(bits) + ")");
  if (channels < 1 || channels > 2) throw ParseError(path + ": unsupported channel count");
  if (data_off == 0) throw ParseError(path + ": missing data chunk");

  const size_t n = data_len / (2 * static_cast<size_t>(channels));
  AudioClip clip;
  clip.sample_rate = rate;
  clip.samples.resize(n);
  const unsigned char* p = bytes.data() + data_off;
  for (size_t i = 0; i < n; ++i) {
    int32_t acc = 0;
    for (int c = 0; c < channels; ++c) {
      const int16_t s = static_cast<int16_t>(rd_u16(p + (i * channels + c) * 2));
      acc += s;
    }
    clip.samples[i] = static_cast<float>(acc) / (32768.0f * channels);
  }
  return clip;
}

void write_wav(const std::string& path, const AudioClip& clip) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  const uint32_t n = static_cast<uint32_t>(clip.samples.size());
  f.write("RIFF", 4);
  wr_u32(f, 36 + 2 * n);
  f.write("WAVE", 4);
  f.write("fmt ", 4);
  wr_u32(f, 16);
  wr_u16(f, 1);  // PCM
  wr_u16(f, 1);  // mono
  wr_u32(f, static_cast<uint32_t>(clip.sample_rate));
  wr_u32(f, static_cast<uint32_t>(clip.sample_rate) * 2);
  wr_u16(f, 2);
  wr_u16(f, 16);
  f.write("data", 4);
  wr_u32(f, 2 * n);
  for (float v : clip.samples) {
    const float c = std::max(-1.0f, std::min(1.0f, v));
    wr_u16(f, static_cast<uint16_t>(static_cast<int16_t>(std::lrintf(c * 32767.0f))));
  }
  if (!f) throw IoError("short write to " + path);
}

AudioClip resample(const AudioClip& clip, int target_rate) {
  if (clip.sample_rate == target_rate) return clip;
  if (clip.sample_rate <= 0 || target_rate <= 0) throw InvalidConfig("resample: bad rates");
  const double ratio = static_cast<double>(target_rate) / clip.sample_rate;
  const int64_t n_in = static_cast<int64_t>(clip.samples.size());
  const int64_t n_out = static_cast<int64_t>(std::floor(n_in * ratio));
  const int taps = 32;
  // Anti-alias relative to the input rate when downsampling.
  const double cutoff = 0.95 * std::min(1.0, ratio);

  AudioClip out;
  out.sample_rate = target_rate;
  out.samples.resize(static_cast<size_t>(n_out));
  for (int64_t i = 0; i < n_out; ++i) {
    const double center = static_cast<double>(i) / ratio;
    const int64_t lo = static_cast<int64_t>(std::ceil(center)) - taps;
    const int64_t hi = static_cast<int64_t>(std::floor(center)) + taps;
    double acc = 0.0;
    for (int64_t j = std::max<int64_t>(lo, 0); j <= std::min(hi, n_in - 1); ++j) {
      const double x = (static_cast<double>(j) - center) * cutoff;
      const double sinc = x == 0.0 ? 1.0 : std::sin(M_PI * x) / (M_PI * x);
      const double w = 0.5 + 0.5 * std::cos(M_PI * (static_cast<double>(j) - center) / taps);
      acc += clip.samples[static_cast<size_t>(j)] * sinc * cutoff * w;
    }
    out.samples[static_cast<size_t>(i)] = static_cast<float>(acc);
  }
  return out;
}

AudioClip read_wav_resampled(const std::string& path, int target_rate) {
  return resample(read_wav(path), target_rate);
}

}  // namespace sda
