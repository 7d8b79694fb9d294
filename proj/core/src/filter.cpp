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

#include "rdae/filter.hpp"

#include <algorithm>
#include <cmath>

#include "rdae/error.hpp"

namespace rdae {

namespace {

struct Biquad {
  double b0, b1, b2, a1, a2;  // normalized, a0 == 1

  // Direct form II transposed, zero initial state.
  void apply(std::vector<double>& x) const {
    double s1 = 0.0, s2 = 0.0;
    for (double& v : x) {
      const double in = v;
      const double out = b0 * in + s1;
      s1 = b1 * in - a1 * out + s2;
      s2 = b2 * in - a2 * out;
      v = out;
    }
  }
};

// RBJ cookbook high-pass section.
Biquad highpass_section(double cutoff_hz, int rate, double q) {
  const double w0 = 2.0 * 3.14159265358979323846 * cutoff_hz / rate;
  const double cw = std::cos(w0);
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  Biquad s;
  s.b0 = (1.0 + cw) / 2.0 / a0;
  s.b1 = -(1.0 + cw) / a0;
  s.b2 = (1.0 + cw) / 2.0 / a0;
  s.a1 = -2.0 * cw / a0;
  s.a2 = (1.0 - alpha) / a0;
  return s;
}

}  // namespace

std::vector<double> butterworth_highpass_filtfilt(const std::vector<double>& x,
                                                  double cutoff_hz,
                                                  int sample_rate_hz) {
  if (sample_rate_hz <= 0) throw ArgumentError("filtfilt: bad sample rate");
  if (cutoff_hz <= 0.0 || cutoff_hz >= 0.5 * sample_rate_hz) {
    throw ArgumentError("filtfilt: cutoff must lie in (0, Nyquist)");
  }

  // 4th-order Butterworth = two cascaded sections with pole Qs
  // 1/(2 cos(pi/8)) and 1/(2 cos(3 pi/8)).
  const Biquad s1 = highpass_section(cutoff_hz, sample_rate_hz, 0.54119610014620);
  const Biquad s2 = highpass_section(cutoff_hz, sample_rate_hz, 1.30656296487638);

  std::vector<double> y = x;
  s1.apply(y);
  s2.apply(y);
  std::reverse(y.begin(), y.end());
  s1.apply(y);
  s2.apply(y);
  std::reverse(y.begin(), y.end());
  return y;
}

}  // namespace rdae
