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

#ifndef RDAE_SYNTH_HPP_
#define RDAE_SYNTH_HPP_

#include <array>
#include <cstdint>
#include <string>

#include "rdae/audio.hpp"
#include "rdae/augment.hpp"

namespace rdae {

// Deterministic synthetic voices: a jittered glottal impulse train through
// three formant resonators. No phonetic realism; the corpus exists so the
// whole pipeline is testable at desk scale without external recordings.
struct SyntheticSpeakerProfile {
  double f0_hz = 0.0;                     // 80 .. 300
  std::array<double, 3> formants_hz{};    // strictly increasing, < 8000
  std::array<double, 3> bandwidths_hz{};  // all positive
  double jitter = 0.0;                    // fractional f0 perturbation per period
};

// Profile derived deterministically from (index, seed): f0 spread over
// roughly 100-240 Hz by golden-ratio spacing, vowel-template formants
// rotated by index. Distinct indices give well-separated voices.
SyntheticSpeakerProfile make_speaker_profile(int index, std::uint64_t seed);

// One sustained, amplitude-modulated voiced utterance at the canonical rate.
// Deterministic given (profile, seed). duration_s must be >= 1; an invalid
// profile throws ArgumentError.
AudioClip synth_utterance(const SyntheticSpeakerProfile& profile, double duration_s,
                          std::uint64_t seed);

// Seeded noise of the requested spectral shape at the canonical rate.
// kind is one of "white", "pink", "babble" ("babble-like" is accepted as an
// alias); anything else throws ArgumentError. duration_s must be >= 10.
NoiseSource synth_noise(const std::string& kind, double duration_s, std::uint64_t seed);

// Full corpus on disk: speech under <out>/speech/<speaker>/<utt>.wav and the
// three noise kinds under <out>/noise/<kind>.wav, all PCM16 WAV.
struct CorpusSpec {
  int num_speakers = 5;
  int utterances_per_speaker = 15;
  double utterance_s = 4.0;  // per utterance
  double noise_s = 60.0;     // per noise kind
  std::uint64_t seed = 0;
};

struct CorpusPaths {
  std::string speech_dir;
  std::string noise_dir;
};

CorpusPaths write_synthetic_corpus(const std::string& out_dir, const CorpusSpec& spec);

}  // namespace rdae

#endif  // RDAE_SYNTH_HPP_
