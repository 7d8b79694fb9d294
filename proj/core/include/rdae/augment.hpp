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

#ifndef RDAE_AUGMENT_HPP_
#define RDAE_AUGMENT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rdae/audio.hpp"

namespace rdae {

// Environmental noise at the canonical rate. `filtered` must be true
// before the source is mixed into anything.
struct NoiseSource {
  std::string name;
  std::vector<double> samples;
  bool filtered = false;
};

// Either clean or an integer dB level.
struct SnrCondition {
  std::optional<int> db;  // nullopt == clean

  bool is_clean() const { return !db.has_value(); }
  static SnrCondition clean() { return {}; }
  static SnrCondition level(int v) { return {v}; }
  // "clean" or the decimal level, as written into manifests.
  std::string label() const { return db ? std::to_string(*db) : "clean"; }
  bool operator==(const SnrCondition&) const = default;
};

// The default multi-condition grid: clean plus -5..20 dB in 5 dB steps.
std::vector<SnrCondition> default_snr_conditions();

// One version (clean or contaminated) of a clean segment. All versions of
// the same clean segment share group_key.
struct ConditionedSegment {
  std::vector<double> samples;
  std::string utterance_id;
  std::string speaker_id;
  int segment_index = 0;
  std::string noise_name;  // empty for clean
  SnrCondition snr;
  std::string group_key;
  double rescale_factor = 1.0;  // applied to the whole mixture if it clipped
};

std::string make_group_key(const std::string& utterance_id, int segment_index);

// 4th-order Butterworth high-pass (forward-backward) over the noise, marking
// it mixable.
NoiseSource highpass_noise(const NoiseSource& noise, double cutoff_hz = 60.0);

// Contiguous excerpt at a seeded-uniform offset. Excerpts with mean-square
// power below 1e-10 are redrawn, at most 16 times.
std::vector<double> draw_noise_excerpt(const NoiseSource& noise, std::size_t length,
                                       std::uint64_t rng_seed);

struct MixResult {
  std::vector<double> samples;
  double noise_gain = 0.0;      // g with output = speech + g * noise
  double rescale_factor = 1.0;  // 1/max|mixture| when it clipped, else 1
};

// speech + g * noise with g chosen so the mixture hits snr_db exactly
// (powers are mean squares over the full segment). A clipping mixture is
// rescaled as a whole, which preserves the realized SNR.
MixResult mix_at_snr(const std::vector<double>& speech,
                     const std::vector<double>& noise_excerpt, int snr_db);

// Seed for the (segment, noise, snr) mixing task; schedule-independent.
std::uint64_t mix_stream_seed(std::uint64_t master_seed, const std::string& group_key,
                              const std::string& noise_name, const SnrCondition& snr);

// Expands each clean segment into 1 clean version plus
// |noises| x |non-clean SNRs| contaminated versions, one shared group_key
// per clean segment. Deterministic given rng_seed.
std::vector<ConditionedSegment> build_multicondition(
    const std::vector<Segment>& clean_segments, const std::vector<NoiseSource>& noises,
    const std::vector<SnrCondition>& snrs, std::uint64_t rng_seed);

// Caps each speaker at target_seconds of clean speech (ordered by utterance
// then segment index); dropped clean segments take all their contaminated
// versions with them.
std::vector<ConditionedSegment> decimate_per_speaker(
    const std::vector<ConditionedSegment>& manifest, int target_seconds = 600);

}  // namespace rdae

#endif  // RDAE_AUGMENT_HPP_
