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

#ifndef RDAE_RESAMPLE_HPP_
#define RDAE_RESAMPLE_HPP_

#include "rdae/audio.hpp"

namespace rdae {

// Windowed-sinc polyphase rational resampler, Kaiser window.
//
// The prototype lowpass is cut at rolloff * min(source, target) / 2 and
// spans kernel_zero_crossings sinc lobes on each side of center. With the
// defaults the 44100 -> 16000 path keeps passband ripple under 0.5 dB up to
// 0.45 * target and attenuates everything above the target Nyquist by more
// than 60 dB (see the frequency-response tests).
struct ResampleOptions {
  double kaiser_beta = 8.6;
  double rolloff = 0.9475;
  int kernel_zero_crossings = 64;
};

// Output length is round-half-up of n * target_hz / source_hz. Mono only.
AudioClip resample(const AudioClip& clip, int target_hz,
                   const ResampleOptions& opts = {});

}  // namespace rdae

#endif  // RDAE_RESAMPLE_HPP_
