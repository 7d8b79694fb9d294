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

#include "rdae/augment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "rdae/error.hpp"
#include "rdae/filter.hpp"
#include "rdae/rng.hpp"

namespace rdae {

namespace {

double mean_square(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

constexpr double kSilentPower = 1e-10;

}  // namespace

std::vector<SnrCondition> default_snr_conditions() {
  std::vector<SnrCondition> out{SnrCondition::clean()};
  for (int db = -5; db <= 20; db += 5) out.push_back(SnrCondition::level(db));
  return out;
}

std::string make_group_key(const std::string& utterance_id, int segment_index) {
  return utterance_id + ":" + std::to_string(segment_index);
}

NoiseSource highpass_noise(const NoiseSource& noise, double cutoff_hz) {
  if (noise.filtered) throw ArgumentError("noise '" + noise.name + "' already filtered");
  NoiseSource out;
  out.name = noise.name;
  out.samples = butterworth_highpass_filtfilt(noise.samples, cutoff_hz, kCanonicalRateHz);
  out.filtered = true;
  return out;
}

std::vector<double> draw_noise_excerpt(const NoiseSource& noise, std::size_t length,
                                       std::uint64_t rng_seed) {
  if (!noise.filtered) throw ArgumentError("noise '" + noise.name + "' not filtered yet");
  if (noise.samples.size() < length) {
    throw ArgumentError("noise '" + noise.name + "' shorter than requested excerpt");
  }
  const std::uint64_t span = noise.samples.size() - length + 1;
  Rng rng(rng_seed);
  for (int attempt = 0; attempt < 16; ++attempt) {
    const std::size_t offset = static_cast<std::size_t>(uniform_u64(rng, span));
    std::vector<double> excerpt(noise.samples.begin() + static_cast<std::ptrdiff_t>(offset),
                                noise.samples.begin() + static_cast<std::ptrdiff_t>(offset + length));
    if (mean_square(excerpt) >= kSilentPower) return excerpt;
  }
  throw DataError("noise '" + noise.name + "': 16 consecutive silent excerpts");
}

MixResult mix_at_snr(const std::vector<double>& speech,
                     const std::vector<double>& noise_excerpt, int snr_db) {
  if (noise_excerpt.size() != speech.size()) {
    throw ArgumentError("mix_at_snr: speech and noise lengths differ");
  }
  const double p_speech = mean_square(speech);
  const double p_noise = mean_square(noise_excerpt);
  if (p_speech < kSilentPower) {
    throw DataError("mix_at_snr: degenerate zero-power speech segment");
  }
  if (p_noise < kSilentPower) {
    throw ArgumentError("mix_at_snr: zero-power noise excerpt");
  }

  MixResult res;
  res.noise_gain = std::sqrt(p_speech / (p_noise * std::pow(10.0, snr_db / 10.0)));
  res.samples.resize(speech.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < speech.size(); ++i) {
    res.samples[i] = speech[i] + res.noise_gain * noise_excerpt[i];
    peak = std::max(peak, std::abs(res.samples[i]));
  }
  if (peak > 1.0) {
    res.rescale_factor = 1.0 / peak;
    for (double& v : res.samples) v *= res.rescale_factor;
  }
  return res;
}

std::uint64_t mix_stream_seed(std::uint64_t master_seed, const std::string& group_key,
                              const std::string& noise_name, const SnrCondition& snr) {
  return stream_seed(master_seed, group_key + "|" + noise_name + "|" + snr.label());
}

std::vector<ConditionedSegment> build_multicondition(
    const std::vector<Segment>& clean_segments, const std::vector<NoiseSource>& noises,
    const std::vector<SnrCondition>& snrs, std::uint64_t rng_seed) {
  std::vector<SnrCondition> levels;
  for (const auto& s : snrs) {
    if (!s.is_clean()) levels.push_back(s);
  }
  if (!levels.empty() && noises.empty()) {
    throw ArgumentError("build_multicondition: non-clean SNRs requested with no noises");
  }
  for (const auto& n : noises) {
    if (!n.filtered) throw ArgumentError("noise '" + n.name + "' not filtered yet");
  }

  std::vector<ConditionedSegment> out;
  out.reserve(clean_segments.size() * (1 + noises.size() * levels.size()));
  for (const auto& seg : clean_segments) {
    const std::string group = make_group_key(seg.utterance_id, seg.segment_index);

    ConditionedSegment clean;
    clean.samples = seg.samples;
    clean.utterance_id = seg.utterance_id;
    clean.speaker_id = seg.speaker_id;
    clean.segment_index = seg.segment_index;
    clean.snr = SnrCondition::clean();
    clean.group_key = group;
    out.push_back(std::move(clean));

    for (const auto& noise : noises) {
      for (const auto& level : levels) {
        const std::uint64_t seed = mix_stream_seed(rng_seed, group, noise.name, level);
        auto excerpt = draw_noise_excerpt(noise, seg.samples.size(), seed);
        auto mixed = mix_at_snr(seg.samples, excerpt, *level.db);

        ConditionedSegment cs;
        cs.samples = std::move(mixed.samples);
        cs.utterance_id = seg.utterance_id;
        cs.speaker_id = seg.speaker_id;
        cs.segment_index = seg.segment_index;
        cs.noise_name = noise.name;
        cs.snr = level;
        cs.group_key = group;
        cs.rescale_factor = mixed.rescale_factor;
        out.push_back(std::move(cs));
      }
    }
  }
  return out;
}

std::vector<ConditionedSegment> decimate_per_speaker(
    const std::vector<ConditionedSegment>& manifest, int target_seconds) {
  // Clean segments per speaker, in (utterance, index) order; each clean
  // segment is one second.
  std::map<std::string, std::vector<std::pair<std::pair<std::string, int>, std::string>>> clean;
  for (const auto& cs : manifest) {
    if (cs.snr.is_clean() && cs.noise_name.empty()) {
      clean[cs.speaker_id].push_back({{cs.utterance_id, cs.segment_index}, cs.group_key});
    }
  }
  std::set<std::string> kept;
  for (auto& [speaker, segs] : clean) {
    std::sort(segs.begin(), segs.end());
    const std::size_t budget = static_cast<std::size_t>(std::max(0, target_seconds));
    for (std::size_t i = 0; i < segs.size() && i < budget; ++i) kept.insert(segs[i].second);
  }

  std::vector<ConditionedSegment> out;
  out.reserve(manifest.size());
  for (const auto& cs : manifest) {
    if (kept.count(cs.group_key)) out.push_back(cs);
  }
  return out;
}

}  // namespace rdae
