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

#ifndef RDAE_AUDIO_HPP_
#define RDAE_AUDIO_HPP_

#include <string>
#include <vector>

namespace rdae {

// Every waveform downstream of the frontend is mono at this rate.
constexpr int kCanonicalRateHz = 16000;

// A waveform plus provenance. One or two channels; stereo survives only
// until to_mono().
struct AudioClip {
  std::vector<std::vector<double>> channels;
  int sample_rate_hz = 0;
  std::string utterance_id;
  std::string speaker_id;  // empty if unknown

  int num_channels() const { return static_cast<int>(channels.size()); }
  std::size_t num_frames() const {
    return channels.empty() ? 0 : channels[0].size();
  }
  // Mono accessor; throws if the clip still has two channels.
  const std::vector<double>& mono() const;
  std::vector<double>& mono();
  double duration_seconds() const {
    return sample_rate_hz > 0
               ? static_cast<double>(num_frames()) / sample_rate_hz
               : 0.0;
  }
};

// Exactly one second of audio at the clip's rate.
struct Segment {
  std::vector<double> samples;
  std::string utterance_id;
  std::string speaker_id;
  int segment_index = 0;
  bool is_speech = false;
};

// Channel mean per frame. Mono input is returned unchanged; more than two
// channels is unsupported.
AudioClip to_mono(const AudioClip& clip);

// Scale so max |sample| == 1. All-zero input passes through untouched.
AudioClip peak_normalize(const AudioClip& clip);

struct VadOptions {
  double frame_seconds = 0.025;
  double hop_seconds = 0.010;
  // A segment is speech iff >= speech_frame_fraction of its frames have
  // energy >= energy_fraction * (90th-percentile frame energy of the
  // utterance) and the segment RMS clears rms_floor.
  double energy_fraction = 0.05;
  double percentile = 0.90;
  double speech_frame_fraction = 0.25;
  double rms_floor = 1e-4;
};

// Cut the clip into consecutive non-overlapping 1-second segments (the
// trailing partial second is dropped) and attach an energy-VAD decision to
// each. Non-speech segments stay in the returned list for audit; callers
// exclude them from manifests.
std::vector<Segment> segment_and_vad(const AudioClip& clip,
                                     const VadOptions& opts = {});

}  // namespace rdae

#endif  // RDAE_AUDIO_HPP_
