// Copyright 2026 The rdae Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RDAE_FFT_HPP_
#define RDAE_FFT_HPP_

#include <complex>
#include <cstddef>
#include <vector>

namespace rdae {

// In-place iterative radix-2 FFT. Size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse = false);

// Forward FFT of a real signal zero-padded to n_fft; returns the
// n_fft/2 + 1 non-negative-frequency bins.
std::vector<std::complex<double>> rfft(const double* x, std::size_t n,
                                       std::size_t n_fft);

}  // namespace rdae

#endif  // RDAE_FFT_HPP_
