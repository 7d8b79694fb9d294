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

#ifndef RDAE_FILTER_HPP_
#define RDAE_FILTER_HPP_

#include <vector>

namespace rdae {

// Zero-phase (forward-backward) 4th-order Butterworth high-pass.
// cutoff_hz must be below the Nyquist frequency.
std::vector<double> butterworth_highpass_filtfilt(const std::vector<double>& x,
                                                  double cutoff_hz,
                                                  int sample_rate_hz);

}  // namespace rdae

#endif  // RDAE_FILTER_HPP_
