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

#include "rdae/metrics.hpp"

#include <algorithm>
#include <map>

#include "rdae/error.hpp"

namespace rdae {

std::string snr_label(const std::optional<int>& snr_db) {
  return snr_db ? std::to_string(*snr_db) : "clean";
}

MetricTables compute_metrics(const std::vector<int>& predictions,
                             const std::vector<int>& labels,
                             const std::vector<Condition>& conditions,
                             int num_classes) {
  if (predictions.size() != labels.size() || predictions.size() != conditions.size()) {
    throw ArgumentError("compute_metrics: predictions, labels and conditions must align");
  }
  if (predictions.empty()) throw ArgumentError("compute_metrics: empty input");
  if (num_classes <= 0) throw ArgumentError("compute_metrics: num_classes must be positive");

  MetricTables m;
  m.total = static_cast<int>(predictions.size());
  m.confusion = Eigen::MatrixXi::Zero(num_classes, num_classes);

  struct Tally {
    int total = 0;
    int correct = 0;
  };
  // SNR buckets keyed by the dB value (nullopt = clean); noise buckets by name.
  std::map<std::optional<int>, Tally> by_snr;
  std::map<std::string, Tally> by_noise;

  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int y = labels[i];
    const int p = predictions[i];
    if (y < 0 || y >= num_classes || p < 0 || p >= num_classes) {
      throw ArgumentError("compute_metrics: class index out of range at sample " +
                          std::to_string(i));
    }
    const bool ok = p == y;
    m.correct += ok ? 1 : 0;
    m.confusion(y, p) += 1;

    Tally& ts = by_snr[conditions[i].snr_db];
    ++ts.total;
    ts.correct += ok ? 1 : 0;
    Tally& tn = by_noise[conditions[i].noise_name.value_or("clean")];
    ++tn.total;
    tn.correct += ok ? 1 : 0;
  }
  m.accuracy = static_cast<double>(m.correct) / static_cast<double>(m.total);

  // Macro-F1 over classes; absent precision/recall denominators count as 0.
  double f1_sum = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    const double tp = m.confusion(c, c);
    const double fn = m.confusion.row(c).sum() - tp;
    const double fp = m.confusion.col(c).sum() - tp;
    const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    f1_sum += precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  }
  m.macro_f1 = f1_sum / static_cast<double>(num_classes);

  // Canonical per-SNR order: clean first, then descending dB.
  std::vector<std::optional<int>> snr_keys;
  for (const auto& [k, v] : by_snr) snr_keys.push_back(k);
  std::sort(snr_keys.begin(), snr_keys.end(),
            [](const std::optional<int>& a, const std::optional<int>& b) {
              if (!a) return b.has_value();  // clean sorts first
              if (!b) return false;
              return *a > *b;
            });
  for (const auto& k : snr_keys) {
    const Tally& t = by_snr[k];
    m.per_snr.push_back({snr_label(k), t.total, t.correct,
                         static_cast<double>(t.correct) / static_cast<double>(t.total)});
  }
  for (const auto& [name, t] : by_noise) {
    m.per_noise.push_back({name, t.total, t.correct,
                           static_cast<double>(t.correct) / static_cast<double>(t.total)});
  }
  return m;
}

}  // namespace rdae
