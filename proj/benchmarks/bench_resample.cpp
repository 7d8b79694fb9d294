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

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "rdae/audio.hpp"
#include "rdae/resample.hpp"

namespace {

rdae::AudioClip tone_clip(int sample_rate_hz, double seconds) {
  rdae::AudioClip clip;
  clip.sample_rate_hz = sample_rate_hz;
  const std::size_t n = static_cast<std::size_t>(seconds * sample_rate_hz);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate_hz;
    x[i] = 0.5 * std::sin(2.0 * std::numbers::pi * 440.0 * t) +
           0.25 * std::sin(2.0 * std::numbers::pi * 2330.0 * t);
  }
  clip.channels.push_back(std::move(x));
  return clip;
}

void BM_Resample44kTo16k(benchmark::State& state) {
  const rdae::AudioClip clip = tone_clip(44100, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rdae::resample(clip, 16000));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(clip.num_frames()));
}
BENCHMARK(BM_Resample44kTo16k);

void BM_Resample48kTo16k(benchmark::State& state) {
  const rdae::AudioClip clip = tone_clip(48000, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rdae::resample(clip, 16000));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(clip.num_frames()));
}
BENCHMARK(BM_Resample48kTo16k);

void BM_Resample8kTo16k(benchmark::State& state) {
  const rdae::AudioClip clip = tone_clip(8000, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rdae::resample(clip, 16000));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(clip.num_frames()));
}
BENCHMARK(BM_Resample8kTo16k);

}  // namespace
