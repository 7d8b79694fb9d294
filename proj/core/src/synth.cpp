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

#include "rdae/synth.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <vector>

#include "rdae/error.hpp"
#include "rdae/fft.hpp"
#include "rdae/rng.hpp"
#include "rdae/wav_io.hpp"

namespace rdae {
namespace {

constexpr double kPi = std::numbers::pi;

void validate_profile(const SyntheticSpeakerProfile& p) {
  if (!(p.f0_hz >= 80.0 && p.f0_hz <= 300.0)) {
    throw ArgumentError("speaker profile: f0 must be in [80, 300] Hz, got " +
                        std::to_string(p.f0_hz));
  }
  double prev = 0.0;
  for (double f : p.formants_hz) {
    if (!(f > prev && f < 8000.0)) {
      throw ArgumentError("speaker profile: formants must be strictly increasing "
                          "and below 8000 Hz");
    }
    prev = f;
  }
  for (double bw : p.bandwidths_hz) {
    if (!(bw > 0.0)) {
      throw ArgumentError("speaker profile: formant bandwidths must be positive");
    }
  }
  if (!(p.jitter >= 0.0 && p.jitter <= 0.2)) {
    throw ArgumentError("speaker profile: jitter must be in [0, 0.2]");
  }
}

// Unity-gain-at-resonance two-pole filter (Klatt-style formant resonator).
void resonate(std::vector<double>* x, double freq_hz, double bw_hz, int sample_rate) {
  const double r = std::exp(-kPi * bw_hz / sample_rate);
  const double theta = 2.0 * kPi * freq_hz / sample_rate;
  const double a1 = 2.0 * r * std::cos(theta);
  const double a2 = -r * r;
  const double gain =
      (1.0 - r) * std::sqrt(1.0 - 2.0 * r * std::cos(2.0 * theta) + r * r);
  double y1 = 0.0, y2 = 0.0;
  for (double& v : *x) {
    const double y = gain * v + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    v = y;
  }
}

void peak_normalize_vector(std::vector<double>* x) {
  double peak = 0.0;
  for (double v : *x) peak = std::max(peak, std::abs(v));
  if (peak <= 0.0) return;
  for (double& v : *x) v /= peak;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> white_samples(std::size_t n, Rng& rng) {
  std::vector<double> x(n);
  for (double& v : x) v = normal(rng);
  peak_normalize_vector(&x);
  return x;
}

// Spectral synthesis: hermitian gaussian bins with 1/sqrt(f) magnitude give
// an exactly -3 dB/octave power slope.
std::vector<double> pink_samples(std::size_t n, Rng& rng) {
  const std::size_t m = next_pow2(std::max<std::size_t>(n, 2));
  std::vector<std::complex<double>> spectrum(m, {0.0, 0.0});
  for (std::size_t k = 1; k < m / 2; ++k) {
    const double mag = 1.0 / std::sqrt(static_cast<double>(k));
    spectrum[k] = {mag * normal(rng), mag * normal(rng)};
    spectrum[m - k] = std::conj(spectrum[k]);
  }
  spectrum[m / 2] = {normal(rng) / std::sqrt(static_cast<double>(m / 2)), 0.0};
  fft_inplace(spectrum, /*inverse=*/true);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = spectrum[i].real();
  peak_normalize_vector(&x);
  return x;
}

// Six synthetic voices talking over each other.
std::vector<double> babble_samples(std::size_t n, double duration_s,
                                   std::uint64_t seed) {
  constexpr int kVoices = 6;
  std::vector<double> mix(n, 0.0);
  for (int v = 0; v < kVoices; ++v) {
    const SyntheticSpeakerProfile profile = make_speaker_profile(100 + v, seed);
    const AudioClip clip =
        synth_utterance(profile, duration_s, stream_seed(seed, "voice" + std::to_string(v)));
    const std::vector<double>& samples = clip.mono();
    for (std::size_t i = 0; i < n && i < samples.size(); ++i) mix[i] += samples[i];
  }
  peak_normalize_vector(&mix);
  return mix;
}

}  // namespace

SyntheticSpeakerProfile make_speaker_profile(int index, std::uint64_t seed) {
  if (index < 0) throw ArgumentError("speaker index must be non-negative");
  Rng rng(stream_seed(seed, "speaker" + std::to_string(index)));

  // Golden-ratio spacing keeps f0 values well separated for any number of
  // speakers without needing to know the total count.
  constexpr double kGolden = 0.6180339887498949;
  const double u = std::fmod(static_cast<double>(index) * kGolden, 1.0);

  // Rotated vowel templates (roughly /a/, /i/, /e/, /o/, /ae/) scaled by a
  // per-speaker vocal-tract factor.
  static constexpr std::array<std::array<double, 3>, 5> kTemplates = {{
      {730.0, 1090.0, 2440.0},
      {270.0, 2290.0, 3010.0},
      {530.0, 1840.0, 2480.0},
      {440.0, 1020.0, 2240.0},
      {660.0, 1720.0, 2410.0},
  }};
  const std::array<double, 3>& base = kTemplates[static_cast<std::size_t>(index % 5)];
  const double tract = 0.92 + 0.16 * uniform_real(rng);

  SyntheticSpeakerProfile p;
  p.f0_hz = 100.0 + 140.0 * u + uniform_real(rng, -3.0, 3.0);
  for (std::size_t i = 0; i < 3; ++i) {
    p.formants_hz[i] = base[i] * tract * (1.0 + uniform_real(rng, -0.02, 0.02));
  }
  p.bandwidths_hz = {80.0 * (1.0 + 0.1 * uniform_real(rng)),
                     110.0 * (1.0 + 0.1 * uniform_real(rng)),
                     160.0 * (1.0 + 0.1 * uniform_real(rng))};
  p.jitter = 0.005 + 0.005 * uniform_real(rng);
  validate_profile(p);
  return p;
}

AudioClip synth_utterance(const SyntheticSpeakerProfile& profile, double duration_s,
                          std::uint64_t seed) {
  validate_profile(profile);
  if (!(duration_s >= 1.0)) {
    throw ArgumentError("synth_utterance: duration must be >= 1 s, got " +
                        std::to_string(duration_s));
  }
  const int sr = kCanonicalRateHz;
  const std::size_t n = static_cast<std::size_t>(std::llround(duration_s * sr));
  Rng rng(seed);

  // Glottal source: unit impulses at jittered pitch periods plus a little
  // aspiration noise so the upper bands are never empty.
  std::vector<double> x(n, 0.0);
  const double base_period = static_cast<double>(sr) / profile.f0_hz;
  double t = uniform_real(rng) * base_period;
  while (t < static_cast<double>(n)) {
    x[static_cast<std::size_t>(t)] = 1.0;
    const double period = base_period * (1.0 + profile.jitter * normal(rng));
    t += std::clamp(period, static_cast<double>(sr) / 400.0,
                    static_cast<double>(sr) / 60.0);
  }
  for (double& v : x) v += 0.01 * normal(rng);

  for (std::size_t i = 0; i < 3; ++i) {
    resonate(&x, profile.formants_hz[i], profile.bandwidths_hz[i], sr);
  }

  // Slow amplitude modulation; the floor keeps every stretch loud enough to
  // pass voice-activity detection.
  const double env_hz = uniform_real(rng, 0.8, 2.5);
  const double env_phase = uniform_real(rng, 0.0, 2.0 * kPi);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] *= 0.75 + 0.25 * std::sin(2.0 * kPi * env_hz * static_cast<double>(i) /
                                       static_cast<double>(sr) +
                                   env_phase);
  }

  AudioClip clip;
  clip.channels.push_back(std::move(x));
  clip.sample_rate_hz = sr;
  return peak_normalize(clip);
}

NoiseSource synth_noise(const std::string& kind, double duration_s, std::uint64_t seed) {
  if (!(duration_s >= 10.0)) {
    throw ArgumentError("synth_noise: duration must be >= 10 s, got " +
                        std::to_string(duration_s));
  }
  const std::size_t n =
      static_cast<std::size_t>(std::llround(duration_s * kCanonicalRateHz));
  Rng rng(seed);

  NoiseSource noise;
  if (kind == "white") {
    noise.samples = white_samples(n, rng);
  } else if (kind == "pink") {
    noise.samples = pink_samples(n, rng);
  } else if (kind == "babble" || kind == "babble-like") {
    noise.samples = babble_samples(n, duration_s, seed);
  } else {
    throw ArgumentError("unknown noise kind '" + kind +
                        "' (expected white, pink or babble)");
  }
  noise.name = kind == "babble-like" ? "babble" : kind;
  return noise;
}

CorpusPaths write_synthetic_corpus(const std::string& out_dir, const CorpusSpec& spec) {
  if (spec.num_speakers < 1) throw ArgumentError("corpus: need at least one speaker");
  if (spec.utterances_per_speaker < 1) {
    throw ArgumentError("corpus: need at least one utterance per speaker");
  }
  if (!(spec.utterance_s >= 1.0)) {
    throw ArgumentError("corpus: utterance duration must be >= 1 s");
  }
  if (!(spec.noise_s >= 10.0)) {
    throw ArgumentError("corpus: noise duration must be >= 10 s");
  }

  CorpusPaths paths;
  paths.speech_dir = out_dir + "/speech";
  paths.noise_dir = out_dir + "/noise";
  std::filesystem::create_directories(paths.speech_dir);
  std::filesystem::create_directories(paths.noise_dir);

  char buf[32];
  for (int s = 0; s < spec.num_speakers; ++s) {
    std::snprintf(buf, sizeof buf, "spk%02d", s);
    const std::string speaker = buf;
    const std::string speaker_dir = paths.speech_dir + "/" + speaker;
    std::filesystem::create_directories(speaker_dir);
    const SyntheticSpeakerProfile profile = make_speaker_profile(s, spec.seed);
    for (int u = 0; u < spec.utterances_per_speaker; ++u) {
      std::snprintf(buf, sizeof buf, "utt%03d", u);
      const std::string utt = buf;
      AudioClip clip = synth_utterance(
          profile, spec.utterance_s,
          stream_seed(spec.seed, speaker + "/" + utt));
      clip.speaker_id = speaker;
      clip.utterance_id = utt;
      write_wav(speaker_dir + "/" + utt + ".wav", clip);
    }
  }

  for (const char* kind : {"white", "pink", "babble"}) {
    const NoiseSource noise =
        synth_noise(kind, spec.noise_s, stream_seed(spec.seed, std::string("noise/") + kind));
    AudioClip clip;
    clip.channels.push_back(noise.samples);
    clip.sample_rate_hz = kCanonicalRateHz;
    write_wav(paths.noise_dir + "/" + std::string(kind) + ".wav", clip);
  }
  return paths;
}

}  // namespace rdae
