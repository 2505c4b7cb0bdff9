// Copyright 2026 The sdagan Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SDA_FFT_HPP_
#define SDA_FFT_HPP_

#include <complex>
#include <cstdint>
#include <vector>

namespace sda {

// In-place iterative radix-2 FFT; n must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a);

// One-sided power spectrum |DFT(frame zero-padded to nfft)|^2, bins
// 0..nfft/2. Falls back to a direct DFT when nfft is not a power of two.
void power_spectrum(const double* frame, int64_t n, int64_t nfft, double* out);

}  // namespace sda

#endif  // SDA_FFT_HPP_
