// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0

#include "sda/melf.hpp"

#include <cstring>
#include <fstream>

namespace sda {

namespace {

constexpr char kMagic[4] = {'M', 'E', 'L', 'F'};
constexpr uint32_t kVersion = 1;

void wr_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<char*>(b), 4);
}

uint32_t rd_u32(std::istream& is, const std::string& path) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw ParseError(path + ": truncated MELF header");
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

MelfHeader read_header(std::istream& is, const std::string& path) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw ParseError(path + ": not a MELF file");
  MelfHeader h;
  h.version = rd_u32(is, path);
  if (h.version != kVersion)
    throw VersionError(path + ": MELF version " + std::to_string(h.version));
  h.n_frames = rd_u32(is, path);
  h.n_mels = rd_u32(is, path);
  char flag = 0;
  if (!is.read(&flag, 1)) throw ParseError(path + ": truncated MELF header");
  h.normalized = flag != 0;
  return h;
}

}  // namespace

void write_melf(const std::string& path, const MelSpectrogram& mel) {
  if (mel.values.rank() != 2) throw ShapeMismatch("write_melf: rank-2 values expected");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f.write(kMagic, 4);
  wr_u32(f, kVersion);
  wr_u32(f, static_cast<uint32_t>(mel.n_frames()));
  wr_u32(f, static_cast<uint32_t>(mel.n_mels()));
  const char flag = mel.normalized ? 1 : 0;
  f.write(&flag, 1);
  static_assert(sizeof(float) == 4);
  f.write(reinterpret_cast<const char*>(mel.values.ptr()),
          static_cast<std::streamsize>(mel.values.numel() * 4));
  if (!f) throw IoError("short write to " + path);
}

MelfHeader read_melf_header(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw MissingFile("cannot open " + path);
  return read_header(f, path);
}

MelSpectrogram read_melf(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw MissingFile("cannot open " + path);
  const MelfHeader h = read_header(f, path);
  MelSpectrogram mel;
  mel.normalized = h.normalized;
  mel.values = Tensor<float>({static_cast<int64_t>(h.n_frames), static_cast<int64_t>(h.n_mels)});
  if (!f.read(reinterpret_cast<char*>(mel.values.ptr()),
              static_cast<std::streamsize>(mel.values.numel() * 4)))
    throw ParseError(path + ": truncated MELF payload");
  return mel;
}

void write_norm_stats(const std::string& path, const NormStats& stats) {
  MelSpectrogram carrier;
  const int64_t mels = stats.mean.numel();
  carrier.values = Tensor<float>({2, mels});
  std::copy_n(stats.mean.ptr(), mels, carrier.values.ptr());
  std::copy_n(stats.std.ptr(), mels, carrier.values.ptr() + mels);
  write_melf(path, carrier);
}

NormStats read_norm_stats(const std::string& path) {
  const MelSpectrogram carrier = read_melf(path);
  if (carrier.n_frames() != 2)
    throw HeaderMismatch(path + ": norm stats container must have n_frames=2");
  const int64_t mels = carrier.n_mels();
  NormStats st;
  st.mean = Tensor<float>({mels});
  st.std = Tensor<float>({mels});
  std::copy_n(carrier.values.ptr(), mels, st.mean.ptr());
  std::copy_n(carrier.values.ptr() + mels, mels, st.std.ptr());
  for (int64_t m = 0; m < mels; ++m)
    if (!(st.std[m] > 0)) throw HeaderMismatch(path + ": non-positive std in norm stats");
  return st;
}

}  // namespace sda
