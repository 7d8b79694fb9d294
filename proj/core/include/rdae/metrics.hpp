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

#ifndef RDAE_METRICS_HPP_
#define RDAE_METRICS_HPP_

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace rdae {

// The (noise, SNR) condition a test sample was evaluated under.
struct Condition {
  std::optional<std::string> noise_name;  // nullopt for clean
  std::optional<int> snr_db;              // nullopt for clean
};

// Condition label helpers: "clean" or the decimal dB value.
std::string snr_label(const std::optional<int>& snr_db);

struct ConditionAccuracy {
  std::string condition;
  int total = 0;
  int correct = 0;
  double accuracy = 0.0;
};

struct MetricTables {
  int total = 0;
  int correct = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  // per_snr in canonical report order: clean first, then SNR descending.
  std::vector<ConditionAccuracy> per_snr;
  // per_noise sorted by noise name; the clean bucket is labeled "clean".
  std::vector<ConditionAccuracy> per_noise;
  Eigen::MatrixXi confusion;  // rows = true class, cols = predicted class
};

// predictions/labels are class indices in [0, num_classes); conditions is
// aligned with them. Throws ArgumentError on length mismatch or an index out
// of range.
MetricTables compute_metrics(const std::vector<int>& predictions,
                             const std::vector<int>& labels,
                             const std::vector<Condition>& conditions, int num_classes);

}  // namespace rdae

#endif  // RDAE_METRICS_HPP_
