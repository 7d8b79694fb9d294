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

#ifndef RDAE_WAV_IO_HPP_
#define RDAE_WAV_IO_HPP_

#include <string>

#include "rdae/audio.hpp"

namespace rdae {

// Reads a RIFF/WAVE file. PCM 16-bit only, 1 or 2 channels; samples are
// scaled by 1/32768 into [-1, 1). The utterance id defaults to the file
// stem.
AudioClip load_wav(const std::string& path);

// Writes PCM16. Samples are clamped to [-1, 1) and rounded to the nearest
// integer code.
void write_wav(const std::string& path, const AudioClip& clip);

}  // namespace rdae

#endif  // RDAE_WAV_IO_HPP_
