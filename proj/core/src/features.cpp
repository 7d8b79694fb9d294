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

#include "rdae/features.hpp"

#include <cmath>
#include <memory>
#include <mutex>

#include "rdae/audio.hpp"
#include "rdae/error.hpp"
#include "rdae/fft.hpp"

namespace rdae {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

}  // namespace

Eigen::MatrixXd stft_power(const std::vector<double>& segment, const StftSpec& spec) {
  if (static_cast<int>(segment.size()) != spec.segment_samples) {
    throw ArgumentError("stft_power: expected " + std::to_string(spec.segment_samples) +
                        " samples, got " + std::to_string(segment.size()));
  }
  const int frames = spec.num_frames();
  const int bins = spec.num_bins();

  // Periodic Hann.
  std::vector<double> window(static_cast<std::size_t>(spec.frame_length));
  for (int i = 0; i < spec.frame_length; ++i) {
    window[static_cast<std::size_t>(i)] =
        0.5 - 0.5 * std::cos(kTwoPi * i / spec.frame_length);
  }

  Eigen::MatrixXd power(frames, bins);
  std::vector<double> buf(static_cast<std::size_t>(spec.frame_length));
  for (int f = 0; f < frames; ++f) {
    const std::size_t start = static_cast<std::size_t>(f) * static_cast<std::size_t>(spec.hop);
    for (int i = 0; i < spec.frame_length; ++i) {
      buf[static_cast<std::size_t>(i)] =
          segment[start + static_cast<std::size_t>(i)] * window[static_cast<std::size_t>(i)];
    }
    const auto spectrum = rfft(buf.data(), buf.size(), static_cast<std::size_t>(spec.fft_size));
    for (int k = 0; k < bins; ++k) {
      power(f, k) = std::norm(spectrum[static_cast<std::size_t>(k)]);
    }
  }
  return power;
}

Eigen::MatrixXd mel_filterbank(int n_bands, int fft_size, int sample_rate_hz,
                               double f_min_hz, double f_max_hz) {
  if (n_bands <= 0 || fft_size <= 0) throw ArgumentError("mel_filterbank: bad dimensions");
  const int bins = fft_size / 2 + 1;
  const double mel_lo = hz_to_mel(f_min_hz);
  const double mel_hi = hz_to_mel(f_max_hz);

  // n_bands + 2 edge points, equally spaced in mel.
  std::vector<double> edges_hz(static_cast<std::size_t>(n_bands) + 2);
  for (int i = 0; i < n_bands + 2; ++i) {
    edges_hz[static_cast<std::size_t>(i)] =
        mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (n_bands + 1));
  }

  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(n_bands, bins);
  for (int b = 0; b < n_bands; ++b) {
    const double lo = edges_hz[static_cast<std::size_t>(b)];
    const double mid = edges_hz[static_cast<std::size_t>(b) + 1];
    const double hi = edges_hz[static_cast<std::size_t>(b) + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate_hz / fft_size;
      if (f <= lo || f >= hi) continue;
      fb(b, k) = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
    }
  }
  return fb;
}

Eigen::MatrixXd mel_project(const Eigen::MatrixXd& power, const Eigen::MatrixXd& filterbank) {
  if (power.cols() != filterbank.cols()) {
    throw ArgumentError("mel_project: bin count mismatch");
  }
  Eigen::MatrixXd mel = power * filterbank.transpose();
  return (mel.array() + kLogFloor).log().matrix();
}

namespace {

const Eigen::MatrixXd& shared_filterbank() {
  static std::once_flag once;
  static std::unique_ptr<Eigen::MatrixXd> fb;
  std::call_once(once, [] {
    fb = std::make_unique<Eigen::MatrixXd>(
        mel_filterbank(kMelBands, StftSpec{}.fft_size, kCanonicalRateHz, 0.0, 8000.0));
  });
  return *fb;
}

}  // namespace

Eigen::MatrixXd melspectrogram(const std::vector<double>& segment) {
  return mel_project(stft_power(segment), shared_filterbank());
}

NormStats fit_norm_stats(const std::vector<const Eigen::MatrixXd*>& train, NormScope scope) {
  if (train.empty()) throw ArgumentError("fit_norm_stats: empty training list");

  NormStats stats;
  stats.scope = scope;
  if (scope == NormScope::kGlobal) {
    double sum = 0.0, sum_sq = 0.0;
    std::size_t count = 0;
    for (const auto* m : train) {
      sum += m->sum();
      sum_sq += m->array().square().sum();
      count += static_cast<std::size_t>(m->size());
    }
    stats.mean = sum / static_cast<double>(count);
    const double var =
        std::max(0.0, sum_sq / static_cast<double>(count) - stats.mean * stats.mean);
    stats.std = std::max(std::sqrt(var), 1e-8);
  } else {
    const auto bands = train.front()->cols();
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(bands);
    Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(bands);
    std::size_t rows = 0;
    for (const auto* m : train) {
      if (m->cols() != bands) throw ArgumentError("fit_norm_stats: band count mismatch");
      sum += m->colwise().sum().transpose();
      sum_sq += m->array().square().colwise().sum().matrix().transpose();
      rows += static_cast<std::size_t>(m->rows());
    }
    stats.band_mean = sum / static_cast<double>(rows);
    stats.band_std =
        ((sum_sq / static_cast<double>(rows)).array() - stats.band_mean.array().square())
            .max(0.0)
            .sqrt()
            .max(1e-8)
            .matrix();
    // Scalar fields kept as the pooled fallback.
    stats.mean = stats.band_mean.mean();
    stats.std = std::max(stats.band_std.mean(), 1e-8);
  }
  return stats;
}

Eigen::MatrixXd apply_norm(const Eigen::MatrixXd& x, const NormStats& stats) {
  if (stats.scope == NormScope::kGlobal) {
    return ((x.array() - stats.mean) / stats.std).matrix();
  }
  if (x.cols() != stats.band_mean.size()) {
    throw ArgumentError("apply_norm: band count mismatch");
  }
  Eigen::MatrixXd out = x;
  out.rowwise() -= stats.band_mean.transpose();
  out.array().rowwise() /= stats.band_std.transpose().array();
  return out;
}

}  // namespace rdae
