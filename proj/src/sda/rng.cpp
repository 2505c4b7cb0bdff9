// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0

#include "sda/rng.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "sda/common.hpp"

namespace sda {

namespace {

uint64_t splitmix64(uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(uint64_t seed) : seed_(seed) {
  uint64_t sm = seed;
  for (auto& w : s_) w = splitmix64(sm);
  // xoshiro must not start from the all-zero state.
  if (s_[0] == 0 && s_[1] == 0 && s_[2] == 0 && s_[3] == 0) s_[0] = 1;
}

RngStream RngStream::split(const std::string& label) const {
  return RngStream(seed_ ^ fnv1a64(label));
}

uint64_t RngStream::next_u64() {
  const uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

uint64_t RngStream::next_below(uint64_t n) {
  if (n == 0) throw std::invalid_argument("next_below: n must be >= 1");
  // Rejection sampling over the top of the range to avoid modulo bias.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % n;
}

double RngStream::next_gauss() {
  // Box-Muller, keeping only the cosine branch so no spare value lives in
  // the state.
  double u1;
  do {
    u1 = next_double();
  } while (u1 <= 0.0);
  const double u2 = next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

void RngStream::fill_gauss(float* out, size_t n) {
  for (size_t i = 0; i < n; ++i) out[i] = static_cast<float>(next_gauss());
}

void RngStream::fill_gauss(double* out, size_t n) {
  for (size_t i = 0; i < n; ++i) out[i] = next_gauss();
}

std::string RngStream::state_hex() const {
  char buf[5 * 17];
  std::snprintf(buf, sizeof(buf), "%016llx:%016llx:%016llx:%016llx:%016llx",
                (unsigned long long)s_[0], (unsigned long long)s_[1],
                (unsigned long long)s_[2], (unsigned long long)s_[3],
                (unsigned long long)seed_);
  return buf;
}

RngStream RngStream::from_state_hex(const std::string& hex) {
  RngStream r;
  unsigned long long w[5];
  if (std::sscanf(hex.c_str(), "%llx:%llx:%llx:%llx:%llx", &w[0], &w[1], &w[2], &w[3], &w[4]) != 5)
    throw ParseError("bad rng state: " + hex);
  for (int i = 0; i < 4; ++i) r.s_[i] = w[i];
  r.seed_ = w[4];
  return r;
}

}  // namespace sda
