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

#include "rdae/handcrafted.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

#include "rdae/audio.hpp"
#include "rdae/error.hpp"
#include "rdae/features.hpp"
#include "rdae/fft.hpp"

namespace rdae {
namespace {

constexpr int kFrameLen = 400;   // 25 ms at 16 kHz
constexpr int kFrameHop = 160;   // 10 ms
constexpr int kLagLo = 40;       // 400 Hz
constexpr int kLagHi = 320;      // 50 Hz
constexpr double kVoicingRatio = 0.3;
constexpr int kLpcOrder = 12;
constexpr double kMaxFormantBwHz = 400.0;
constexpr int kNumFormants = 3;
constexpr int kMfccFft = 512;
constexpr int kMfccMelBands = 26;
constexpr int kNumMfcc = 13;

struct FrameAnalysis {
  bool voiced = false;
  double pitch_hz = 0.0;
  std::array<double, kNumFormants> formants_hz{};  // 0 when absent
  std::array<double, kNumMfcc> mfcc{};
  double log_energy = 0.0;
  double zcr = 0.0;
};

// Autocorrelation r[0..max_lag] of one frame.
std::vector<double> autocorrelation(const double* x, int n, int max_lag) {
  std::vector<double> r(static_cast<std::size_t>(max_lag) + 1, 0.0);
  for (int lag = 0; lag <= max_lag; ++lag) {
    double acc = 0.0;
    for (int i = 0; i + lag < n; ++i) acc += x[i] * x[i + lag];
    r[static_cast<std::size_t>(lag)] = acc;
  }
  return r;
}

// Pitch: largest normalized autocorrelation peak in the 50-400 Hz lag range.
void estimate_pitch(const double* x, int n, FrameAnalysis* out) {
  const std::vector<double> r = autocorrelation(x, n, kLagHi);
  const double r0 = r[0];
  if (r0 < 1e-12) return;  // digital silence: unvoiced
  int best_lag = 0;
  double best = 0.0;
  for (int lag = kLagLo; lag <= kLagHi; ++lag) {
    const double v = r[static_cast<std::size_t>(lag)];
    if (v > best) {
      best = v;
      best_lag = lag;
    }
  }
  if (best_lag > 0 && best / r0 > kVoicingRatio) {
    out->voiced = true;
    out->pitch_hz = static_cast<double>(kCanonicalRateHz) / best_lag;
  }
}

// Levinson-Durbin from autocorrelation; returns coefficients a[1..p] of
// A(z) = 1 + sum a_k z^-k, or empty when the frame is degenerate.
std::vector<double> levinson_durbin(const std::vector<double>& r, int p) {
  std::vector<double> a(static_cast<std::size_t>(p) + 1, 0.0);
  double err = r[0];
  if (err < 1e-12) return {};
  for (int i = 1; i <= p; ++i) {
    double acc = r[static_cast<std::size_t>(i)];
    for (int j = 1; j < i; ++j)
      acc += a[static_cast<std::size_t>(j)] * r[static_cast<std::size_t>(i - j)];
    const double k = -acc / err;
    a[static_cast<std::size_t>(i)] = k;
    for (int j = 1; j <= i / 2; ++j) {
      const double tmp = a[static_cast<std::size_t>(j)];
      a[static_cast<std::size_t>(j)] += k * a[static_cast<std::size_t>(i - j)];
      if (j != i - j) a[static_cast<std::size_t>(i - j)] += k * tmp;
    }
    err *= 1.0 - k * k;
    if (err <= 0.0) return {};  // numerically unstable frame
  }
  return a;
}

// Formants: roots of the LPC polynomial with bandwidth below 400 Hz,
// sorted ascending by frequency; first three kept.
void estimate_formants(const double* x, int n, FrameAnalysis* out) {
  // Pre-emphasis plus Hamming window sharpen the spectral envelope the
  // LPC fit sees; both operate on a local copy.
  std::vector<double> w(static_cast<std::size_t>(n));
  w[0] = x[0];
  for (int i = 1; i < n; ++i) w[static_cast<std::size_t>(i)] = x[i] - 0.97 * x[i - 1];
  for (int i = 0; i < n; ++i) {
    const double win =
        0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
    w[static_cast<std::size_t>(i)] *= win;
  }

  const std::vector<double> r = autocorrelation(w.data(), n, kLpcOrder);
  const std::vector<double> a = levinson_durbin(r, kLpcOrder);
  if (a.empty()) return;

  // Companion matrix of z^p + a1 z^(p-1) + ... + ap.
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(kLpcOrder, kLpcOrder);
  for (int i = 0; i < kLpcOrder; ++i) comp(0, i) = -a[static_cast<std::size_t>(i) + 1];
  for (int i = 1; i < kLpcOrder; ++i) comp(i, i - 1) = 1.0;
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(comp, false);

  const double sr = static_cast<double>(kCanonicalRateHz);
  std::vector<double> candidates;
  for (int i = 0; i < kLpcOrder; ++i) {
    const std::complex<double> z = solver.eigenvalues()(i);
    const double mag = std::abs(z);
    const double ang = std::arg(z);
    if (ang <= 0.0 || mag <= 0.0 || mag >= 1.0) continue;  // one per conjugate pair
    const double freq = ang / (2.0 * std::numbers::pi) * sr;
    const double bw = -(sr / std::numbers::pi) * std::log(mag);
    if (freq < 90.0 || freq > 0.975 * sr / 2.0) continue;
    if (bw < kMaxFormantBwHz) candidates.push_back(freq);
  }
  std::sort(candidates.begin(), candidates.end());
  for (int i = 0; i < kNumFormants && i < static_cast<int>(candidates.size()); ++i)
    out->formants_hz[static_cast<std::size_t>(i)] = candidates[static_cast<std::size_t>(i)];
}

const Eigen::MatrixXd& mfcc_filterbank() {
  static Eigen::MatrixXd fb;
  static std::once_flag once;
  std::call_once(once, [] {
    fb = mel_filterbank(kMfccMelBands, kMfccFft, kCanonicalRateHz, 0.0,
                        kCanonicalRateHz / 2.0);
  });
  return fb;
}

// 13 MFCCs: periodic-Hann power spectrum -> 26-band log-mel -> DCT-II 0..12.
void compute_mfcc(const double* x, int n, FrameAnalysis* out) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    w[static_cast<std::size_t>(i)] =
        x[i] * (0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n));
  }
  const std::vector<std::complex<double>> spec = rfft(w.data(), n, kMfccFft);
  Eigen::VectorXd power(static_cast<Eigen::Index>(spec.size()));
  for (std::size_t i = 0; i < spec.size(); ++i)
    power(static_cast<Eigen::Index>(i)) = std::norm(spec[i]);

  const Eigen::MatrixXd& fb = mfcc_filterbank();
  Eigen::VectorXd mel = fb * power;
  for (Eigen::Index b = 0; b < mel.size(); ++b)
    mel(b) = std::log(mel(b) + kLogFloor);

  for (int c = 0; c < kNumMfcc; ++c) {
    double acc = 0.0;
    for (int b = 0; b < kMfccMelBands; ++b) {
      acc += mel(b) * std::cos(std::numbers::pi * c * (b + 0.5) / kMfccMelBands);
    }
    out->mfcc[static_cast<std::size_t>(c)] = acc;
  }
}

FrameAnalysis analyze_frame(const double* x, int n) {
  FrameAnalysis fa;
  double energy = 0.0;
  int crossings = 0;
  for (int i = 0; i < n; ++i) {
    energy += x[i] * x[i];
    if (i > 0 && (x[i] >= 0.0) != (x[i - 1] >= 0.0)) ++crossings;
  }
  fa.log_energy = std::log(energy + kLogFloor);
  fa.zcr = static_cast<double>(crossings) / n;
  estimate_pitch(x, n, &fa);
  if (fa.voiced) estimate_formants(x, n, &fa);
  compute_mfcc(x, n, &fa);
  return fa;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd ms;
  if (v.empty()) return ms;
  double sum = 0.0;
  for (double x : v) sum += x;
  ms.mean = sum / static_cast<double>(v.size());
  double sq = 0.0;
  for (double x : v) sq += (x - ms.mean) * (x - ms.mean);
  ms.std = std::sqrt(sq / static_cast<double>(v.size()));
  return ms;
}

}  // namespace

std::string handcrafted_layout_description() {
  return "pitch_mean,pitch_std,"
         "f1_mean,f1_std,f2_mean,f2_std,f3_mean,f3_std,"
         "mfcc0_mean,mfcc0_std,mfcc1_mean,mfcc1_std,mfcc2_mean,mfcc2_std,"
         "mfcc3_mean,mfcc3_std,mfcc4_mean,mfcc4_std,mfcc5_mean,mfcc5_std,"
         "mfcc6_mean,mfcc6_std,mfcc7_mean,mfcc7_std,mfcc8_mean,mfcc8_std,"
         "mfcc9_mean,mfcc9_std,mfcc10_mean,mfcc10_std,mfcc11_mean,mfcc11_std,"
         "mfcc12_mean,mfcc12_std,"
         "energy_mean,energy_std,"
         "voiced_fraction,voicing_flag,zcr_mean,zcr_std";
}

HandcraftedVector handcrafted_features(const std::vector<double>& segment) {
  if (static_cast<int>(segment.size()) < kFrameLen) {
    throw ArgumentError("handcrafted_features: segment shorter than one 25 ms frame");
  }
  const int n = static_cast<int>(segment.size());
  const int num_frames = (n - kFrameLen) / kFrameHop + 1;

  std::vector<FrameAnalysis> frames;
  frames.reserve(static_cast<std::size_t>(num_frames));
  for (int f = 0; f < num_frames; ++f)
    frames.push_back(analyze_frame(segment.data() + f * kFrameHop, kFrameLen));

  std::vector<double> pitches;
  std::array<std::vector<double>, kNumFormants> formants;
  std::array<std::vector<double>, kNumMfcc> mfccs;
  std::vector<double> energies, zcrs;
  for (const FrameAnalysis& fa : frames) {
    if (fa.voiced) {
      pitches.push_back(fa.pitch_hz);
      for (int i = 0; i < kNumFormants; ++i) {
        const double f = fa.formants_hz[static_cast<std::size_t>(i)];
        if (f > 0.0) formants[static_cast<std::size_t>(i)].push_back(f);
      }
    }
    for (int c = 0; c < kNumMfcc; ++c)
      mfccs[static_cast<std::size_t>(c)].push_back(fa.mfcc[static_cast<std::size_t>(c)]);
    energies.push_back(fa.log_energy);
    zcrs.push_back(fa.zcr);
  }

  HandcraftedVector v{};
  const MeanStd pitch = mean_std(pitches);
  v[0] = pitch.mean;
  v[1] = pitch.std;
  for (int i = 0; i < kNumFormants; ++i) {
    const MeanStd f = mean_std(formants[static_cast<std::size_t>(i)]);
    v[static_cast<std::size_t>(2 + 2 * i)] = f.mean;
    v[static_cast<std::size_t>(3 + 2 * i)] = f.std;
  }
  for (int c = 0; c < kNumMfcc; ++c) {
    const MeanStd m = mean_std(mfccs[static_cast<std::size_t>(c)]);
    v[static_cast<std::size_t>(8 + 2 * c)] = m.mean;
    v[static_cast<std::size_t>(9 + 2 * c)] = m.std;
  }
  const MeanStd e = mean_std(energies);
  v[34] = e.mean;
  v[35] = e.std;
  v[36] = static_cast<double>(pitches.size()) / static_cast<double>(num_frames);
  v[37] = pitches.empty() ? 0.0 : 1.0;
  const MeanStd z = mean_std(zcrs);
  v[38] = z.mean;
  v[39] = z.std;
  return v;
}

}  // namespace rdae
