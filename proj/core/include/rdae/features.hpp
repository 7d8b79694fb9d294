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

#ifndef RDAE_FEATURES_HPP_
#define RDAE_FEATURES_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace rdae {

// 70 ms window / 50% overlap at 16 kHz, FFT 2048: a 1-second segment gives
// exactly 27 frames of 1025 one-sided power bins.
struct StftSpec {
  int segment_samples = 16000;
  int frame_length = 1120;
  int hop = 560;
  int fft_size = 2048;

  int num_frames() const { return (segment_samples - frame_length) / hop + 1; }
  int num_bins() const { return fft_size / 2 + 1; }
};

constexpr int kMelBands = 140;
constexpr int kFramesPerSegment = 27;
constexpr double kLogFloor = 1e-10;

// Hann-windowed one-sided power spectra, frames x bins (27 x 1025).
Eigen::MatrixXd stft_power(const std::vector<double>& segment, const StftSpec& spec = {});

// Triangular mel filters on the HTK scale (m = 2595 log10(1 + f/700)),
// rows = bands, columns = FFT bins.
Eigen::MatrixXd mel_filterbank(int n_bands, int fft_size, int sample_rate_hz,
                               double f_min_hz, double f_max_hz);

// Per-frame filterbank projection followed by log(x + 1e-10).
// power: frames x bins, filterbank: bands x bins -> frames x bands.
Eigen::MatrixXd mel_project(const Eigen::MatrixXd& power, const Eigen::MatrixXd& filterbank);

// stft_power + the shared 140-band filterbank in one step (27 x 140).
Eigen::MatrixXd melspectrogram(const std::vector<double>& segment);

enum class NormScope { kGlobal, kPerBand };

// Global scalar mean/std over every entry of the training matrices
// (optionally one pair per mel band). std is floored at 1e-8.
struct NormStats {
  double mean = 0.0;
  double std = 1.0;
  NormScope scope = NormScope::kGlobal;
  Eigen::VectorXd band_mean;  // used when scope == kPerBand
  Eigen::VectorXd band_std;
  std::string origin;  // which training subset produced these stats
};

NormStats fit_norm_stats(const std::vector<const Eigen::MatrixXd*>& train,
                         NormScope scope = NormScope::kGlobal);
Eigen::MatrixXd apply_norm(const Eigen::MatrixXd& x, const NormStats& stats);

}  // namespace rdae

#endif  // RDAE_FEATURES_HPP_
