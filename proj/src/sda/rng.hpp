// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic, serializable random streams. One master seed is split into
// independent child streams by label, so adding a new consumer never perturbs
// the draws of existing ones. The generator is xoshiro256**; normals come
// from a single-value Box-Muller so the state is exactly four u64 words.

#ifndef SDA_RNG_HPP_
#define SDA_RNG_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace sda {

class RngStream {
 public:
  RngStream() : RngStream(0) {}
  explicit RngStream(uint64_t seed);

  // Child stream derived from this stream's seed and a label. Independent of
  // how much the parent has been consumed.
  RngStream split(const std::string& label) const;

  uint64_t next_u64();
  // Uniform in [0, 1).
  double next_double();
  // Uniform integer in [0, n), n >= 1.
  uint64_t next_below(uint64_t n);
  // Standard normal.
  double next_gauss();

  void fill_gauss(float* out, size_t n);
  void fill_gauss(double* out, size_t n);

  // State as 4 fixed-width hex words, e.g. for checkpoint metadata.
  std::string state_hex() const;
  static RngStream from_state_hex(const std::string& hex);

  bool operator==(const RngStream& o) const { return s_ == o.s_ && seed_ == o.seed_; }

 private:
  std::array<uint64_t, 4> s_{};
  uint64_t seed_ = 0;  // retained so split() is consumption-independent
};

}  // namespace sda

#endif  // SDA_RNG_HPP_
