// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SDA_COMMON_HPP_
#define SDA_COMMON_HPP_

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sda {

// Error taxonomy. CLI maps these onto exit codes: input/format errors -> 2,
// numerical divergence -> 3, artifact/version mismatches -> 4.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeMismatch : InputError {
  using InputError::InputError;
};
struct SampleRateMismatch : InputError {
  using InputError::InputError;
};
struct AudioTooShort : InputError {
  using InputError::InputError;
};
struct InvalidConfig : InputError {
  using InputError::InputError;
};
struct EmptyCorpus : InputError {
  using InputError::InputError;
};
struct EmptySpectrogram : InputError {
  using InputError::InputError;
};
struct EmptyEvalSet : InputError {
  using InputError::InputError;
};
struct EmptyBand : InputError {
  using InputError::InputError;
};
struct LayoutMismatch : InputError {
  using InputError::InputError;
};
struct ParseError : InputError {
  using InputError::InputError;
};
struct MissingFile : InputError {
  using InputError::InputError;
};
struct HeaderMismatch : InputError {
  using InputError::InputError;
};
struct UtteranceTooShort : InputError {
  using InputError::InputError;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonFiniteLoss : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CorruptCheckpoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct VersionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 64-bit FNV-1a, used for stream labels and content hashing.
inline uint64_t fnv1a64(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

}  // namespace sda

#endif  // SDA_COMMON_HPP_
