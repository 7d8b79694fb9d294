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

#ifndef RDAE_HANDCRAFTED_HPP_
#define RDAE_HANDCRAFTED_HPP_

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace rdae {

constexpr int kHandcraftedDim = 40;

// Fixed slot layout of the 40-dim vector; see layout_description().
//   [0..1]    pitch mean/std over voiced frames (Hz; 0 if unvoiced)
//   [2..7]    formants 1..3 mean/std over voiced frames (Hz)
//   [8..33]   MFCC 0..12 mean/std over all frames
//   [34..35]  log-energy mean/std over all frames
//   [36]      voiced frame fraction
//   [37]      voicing flag (1 if any frame is voiced)
//   [38..39]  zero-crossing rate mean/std
using HandcraftedVector = std::array<double, kHandcraftedDim>;

// Human-readable slot list, embedded in the handcrafted cache header.
std::string handcrafted_layout_description();

// 25 ms / 10 ms frame analysis over a 1-second segment: autocorrelation
// pitch (50-400 Hz, voicing when the normalized peak exceeds 0.3), order-12
// LPC root formants (bandwidth < 400 Hz), 13 MFCCs (DCT-II of a 26-band
// log-mel), and log energy, aggregated to mean/std slots.
HandcraftedVector handcrafted_features(const std::vector<double>& segment);

}  // namespace rdae

#endif  // RDAE_HANDCRAFTED_HPP_
