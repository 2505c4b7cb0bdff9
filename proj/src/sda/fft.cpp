// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0

#include "sda/fft.hpp"

#include <cmath>

namespace sda {

void fft_radix2(std::vector<std::complex<double>>& a) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

void power_spectrum(const double* frame, int64_t n, int64_t nfft, double* out) {
  const int64_t half = nfft / 2;
  if ((nfft & (nfft - 1)) == 0) {
    std::vector<std::complex<double>> a(static_cast<size_t>(nfft), {0.0, 0.0});
    for (int64_t i = 0; i < n && i < nfft; ++i) a[static_cast<size_t>(i)] = frame[i];
    fft_radix2(a);
    for (int64_t k = 0; k <= half; ++k) out[k] = std::norm(a[static_cast<size_t>(k)]);
    return;
  }
  for (int64_t k = 0; k <= half; ++k) {
    double re = 0.0, im = 0.0;
    for (int64_t i = 0; i < n && i < nfft; ++i) {
      const double ang = -2.0 * M_PI * static_cast<double>(k * i) / static_cast<double>(nfft);
      re += frame[i] * std::cos(ang);
      im += frame[i] * std::sin(ang);
    }
    out[k] = re * re + im * im;
  }
}

}  // namespace sda
