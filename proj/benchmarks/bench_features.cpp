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

#include <vector>

#include "rdae/features.hpp"
#include "rdae/handcrafted.hpp"
#include "rdae/synth.hpp"

namespace {

// One canonical 1-second voiced segment, shared by every feature benchmark.
const std::vector<double>& segment() {
  static const std::vector<double> s =
      rdae::synth_utterance(rdae::make_speaker_profile(0, 1), 1.0, 1).mono();
  return s;
}

void BM_StftPower(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(rdae::stft_power(segment()));
  }
}
BENCHMARK(BM_StftPower);

void BM_Melspectrogram(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(rdae::melspectrogram(segment()));
  }
}
BENCHMARK(BM_Melspectrogram);

void BM_MelFilterbank(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        rdae::mel_filterbank(rdae::kMelBands, 2048, 16000, 0.0, 8000.0));
  }
}
BENCHMARK(BM_MelFilterbank);

void BM_HandcraftedFeatures(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(rdae::handcrafted_features(segment()));
  }
}
BENCHMARK(BM_HandcraftedFeatures);

}  // namespace
