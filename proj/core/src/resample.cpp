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

#include "rdae/resample.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <tuple>
#include <vector>

#include "rdae/error.hpp"

namespace rdae {

namespace {

constexpr double kPi = 3.14159265358979323846264338;

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

// Prototype lowpass at the virtually-upsampled rate source_hz * up.
// Designed once per (up, down, beta, rolloff, zc) and shared; immutable
// after construction.
struct Kernel {
  std::vector<double> taps;
  std::int64_t center = 0;
  int up = 1;
  int down = 1;
};

std::shared_ptr<const Kernel> make_kernel(int up, int down, const ResampleOptions& opts) {
  auto k = std::make_shared<Kernel>();
  k->up = up;
  k->down = down;
  // Cutoff as a fraction of the upsampled rate; equals
  // rolloff * min(source, target) / 2 in Hz.
  const double fc = 0.5 * opts.rolloff / static_cast<double>(std::max(up, down));
  const std::int64_t half = static_cast<std::int64_t>(
      std::ceil(opts.kernel_zero_crossings / (2.0 * fc)));
  k->center = half;
  k->taps.resize(static_cast<std::size_t>(2 * half + 1));
  const double i0_beta = std::cyl_bessel_i(0.0, opts.kaiser_beta);
  for (std::int64_t i = 0; i <= 2 * half; ++i) {
    const double t = static_cast<double>(i - half);
    const double u = t / static_cast<double>(half);
    const double kaiser =
        std::cyl_bessel_i(0.0, opts.kaiser_beta * std::sqrt(std::max(0.0, 1.0 - u * u))) /
        i0_beta;
    k->taps[static_cast<std::size_t>(i)] = up * 2.0 * fc * sinc(2.0 * fc * t) * kaiser;
  }
  return k;
}

std::shared_ptr<const Kernel> kernel_for(int up, int down, const ResampleOptions& opts) {
  using Key = std::tuple<int, int, double, double, int>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const Kernel>> cache;
  const Key key{up, down, opts.kaiser_beta, opts.rolloff, opts.kernel_zero_crossings};
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto k = make_kernel(up, down, opts);
  cache[key] = k;
  return k;
}

}  // namespace

AudioClip resample(const AudioClip& clip, int target_hz, const ResampleOptions& opts) {
  if (target_hz <= 0) throw ArgumentError("resample: target rate must be positive");
  const std::vector<double>& x = clip.mono();
  const int source_hz = clip.sample_rate_hz;
  if (source_hz <= 0) throw ArgumentError("resample: bad source rate");
  if (target_hz == source_hz) return clip;

  const int g = std::gcd(source_hz, target_hz);
  const int up = target_hz / g;
  const int down = source_hz / g;
  const auto kernel = kernel_for(up, down, opts);
  const auto& h = kernel->taps;
  const auto h_len = static_cast<std::int64_t>(h.size());
  const auto n_in = static_cast<std::int64_t>(x.size());

  // round-half-up(n_in * target / source)
  const std::int64_t n_out =
      (2 * n_in * static_cast<std::int64_t>(target_hz) + source_hz) /
      (2 * static_cast<std::int64_t>(source_hz));

  std::vector<double> y(static_cast<std::size_t>(n_out), 0.0);
  for (std::int64_t n = 0; n < n_out; ++n) {
    // Position of output sample n in the zero-stuffed stream, shifted by
    // the kernel center so the output is time-aligned with the input.
    const std::int64_t j0 = n * down + kernel->center;
    const std::int64_t phase = j0 % up;
    const std::int64_t base = j0 / up;
    double acc = 0.0;
    std::int64_t k = base >= n_in ? base - n_in + 1 : 0;
    for (std::int64_t tap = phase + k * up; tap < h_len && base - k >= 0; ++k, tap += up) {
      acc += h[static_cast<std::size_t>(tap)] * x[static_cast<std::size_t>(base - k)];
    }
    y[static_cast<std::size_t>(n)] = acc;
  }

  AudioClip out;
  out.sample_rate_hz = target_hz;
  out.utterance_id = clip.utterance_id;
  out.speaker_id = clip.speaker_id;
  out.channels.push_back(std::move(y));
  return out;
}

}  // namespace rdae
