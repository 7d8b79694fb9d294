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

#include "rdae/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "rdae/error.hpp"

namespace rdae {

const std::vector<double>& AudioClip::mono() const {
  if (channels.size() != 1) throw ArgumentError("clip is not mono");
  return channels[0];
}

std::vector<double>& AudioClip::mono() {
  if (channels.size() != 1) throw ArgumentError("clip is not mono");
  return channels[0];
}

AudioClip to_mono(const AudioClip& clip) {
  if (clip.num_channels() == 1) return clip;
  if (clip.num_channels() != 2) {
    throw DataError("unsupported channel count " + std::to_string(clip.num_channels()));
  }
  AudioClip out = clip;
  const std::size_t n = clip.num_frames();
  std::vector<double> mixed(n);
  for (std::size_t i = 0; i < n; ++i) {
    mixed[i] = 0.5 * (clip.channels[0][i] + clip.channels[1][i]);
  }
  out.channels.clear();
  out.channels.push_back(std::move(mixed));
  return out;
}

AudioClip peak_normalize(const AudioClip& clip) {
  double peak = 0.0;
  for (const auto& ch : clip.channels) {
    for (double x : ch) peak = std::max(peak, std::abs(x));
  }
  if (peak == 0.0) return clip;
  AudioClip out = clip;
  const double inv = 1.0 / peak;
  for (auto& ch : out.channels) {
    for (double& x : ch) x *= inv;
  }
  return out;
}

namespace {

double frame_energy(const std::vector<double>& x, std::size_t start, std::size_t len) {
  double acc = 0.0;
  for (std::size_t i = start; i < start + len; ++i) acc += x[i] * x[i];
  return acc / static_cast<double>(len);
}

// Nearest-rank percentile of a copy of v.
double percentile(std::vector<double> v, double p) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto n = static_cast<double>(v.size());
  std::size_t rank = static_cast<std::size_t>(std::ceil(p * n));
  if (rank == 0) rank = 1;
  if (rank > v.size()) rank = v.size();
  return v[rank - 1];
}

}  // namespace

std::vector<Segment> segment_and_vad(const AudioClip& clip, const VadOptions& opts) {
  const std::vector<double>& x = clip.mono();
  const int rate = clip.sample_rate_hz;
  if (rate <= 0) throw ArgumentError("segment_and_vad: bad sample rate");

  const std::size_t seg_len = static_cast<std::size_t>(rate);
  const std::size_t n_segments = x.size() / seg_len;
  std::vector<Segment> segments;
  if (n_segments == 0) return segments;

  const std::size_t frame_len =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(opts.frame_seconds * rate)));
  const std::size_t hop =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(opts.hop_seconds * rate)));

  // Frames are laid on one global grid over the whole utterance; each frame
  // belongs to the segment containing its start sample.
  std::vector<double> energies;
  std::vector<std::size_t> frame_segment;
  for (std::size_t start = 0; start + frame_len <= x.size(); start += hop) {
    const std::size_t seg = start / seg_len;
    if (seg >= n_segments) break;
    energies.push_back(frame_energy(x, start, frame_len));
    frame_segment.push_back(seg);
  }
  const double p90 = percentile(energies, opts.percentile);
  const double threshold = opts.energy_fraction * p90;

  std::vector<int> frames_total(n_segments, 0), frames_active(n_segments, 0);
  for (std::size_t i = 0; i < energies.size(); ++i) {
    frames_total[frame_segment[i]]++;
    if (energies[i] >= threshold) frames_active[frame_segment[i]]++;
  }

  segments.reserve(n_segments);
  for (std::size_t s = 0; s < n_segments; ++s) {
    Segment seg;
    seg.samples.assign(x.begin() + static_cast<std::ptrdiff_t>(s * seg_len),
                       x.begin() + static_cast<std::ptrdiff_t>((s + 1) * seg_len));
    seg.utterance_id = clip.utterance_id;
    seg.speaker_id = clip.speaker_id;
    seg.segment_index = static_cast<int>(s);

    double acc = 0.0;
    for (double v : seg.samples) acc += v * v;
    const double rms = std::sqrt(acc / static_cast<double>(seg_len));
    const bool enough_active =
        frames_total[s] > 0 &&
        static_cast<double>(frames_active[s]) >=
            opts.speech_frame_fraction * static_cast<double>(frames_total[s]);
    seg.is_speech = enough_active && rms >= opts.rms_floor;
    segments.push_back(std::move(seg));
  }
  return segments;
}

}  // namespace rdae
