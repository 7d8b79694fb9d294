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

#ifndef RDAE_HARNESS_HPP_
#define RDAE_HARNESS_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rdae/config.hpp"
#include "rdae/feature_cache.hpp"
#include "rdae/features.hpp"
#include "rdae/folds.hpp"
#include "rdae/metrics.hpp"
#include "rdae/train.hpp"

namespace rdae {

// ---- Grid search -------------------------------------------------------------

// Named hyperparameter axes, each with a finite value list. Points enumerate
// in lexicographic order: axis names sorted, values in their listed order.
struct GridSpec {
  std::map<std::string, std::vector<double>> axes;
  int max_combinations = 64;

  using Point = std::map<std::string, double>;
  std::vector<Point> points() const;  // throws ArgumentError past the budget

  // Reads "grid.<axis> = v1, v2, ..." keys plus optional
  // "grid.max_combinations".
  static GridSpec from_config(const KeyValueConfig& config);
};

std::string format_grid_point(const GridSpec::Point& point);

// Argmin over mean validation losses. NaN entries mark failed (divergent)
// points and are skipped; if every point failed, throws NumericError. Ties
// break toward the lexicographically smaller hyperparameter value tuple
// (axes in sorted-name order), so the choice is independent of evaluation
// order.
std::size_t select_grid_point(const std::vector<GridSpec::Point>& points,
                              const std::vector<double>& mean_losses);

// ---- Feature store with access audit ------------------------------------------

// In-memory view of one feature cache, grouped by group_key. Feature access
// goes through group(), which counts reads per group so the nested-CV
// protocol can prove the outer test set was untouched before evaluation
// (constructing the store and listing metadata do not count).
class FeatureStore {
 public:
  explicit FeatureStore(const std::string& cache_path);

  struct Version {
    CacheRecordMeta meta;
    Eigen::MatrixXd features;
  };
  struct Group {
    std::string group_key;
    std::string speaker_id;
    std::vector<Version> versions;  // clean first, then sorted by (noise, snr)
    int clean_index = -1;           // -1 when the cache has no clean version
  };

  const CacheHeader& header() const { return header_; }
  const std::vector<std::string>& group_keys() const { return group_keys_; }
  const std::vector<std::string>& speakers() const { return speakers_; }
  std::vector<GroupInfo> group_infos() const;  // metadata only, not audited

  const Group& group(const std::string& key);  // audited feature read
  std::int64_t read_count(const std::string& key) const;
  void reset_read_counts();

 private:
  CacheHeader header_;
  std::map<std::string, Group> groups_;
  std::map<std::string, std::int64_t> reads_;
  std::vector<std::string> group_keys_;
  std::vector<std::string> speakers_;
};

// ---- Runs and results -----------------------------------------------------------

// Canonical system identifiers. CLI spellings are lowercase; report names
// use the display form.
enum class System { kJrdae, kIrdae, kTrdae, kHandcrafted };
System parse_system(const std::string& name);        // accepts jrdae|irdae|trdae|handcrafted
std::string system_display_name(System s);           // jRDAE | iRDAE | tRDAE | handcrafted

struct DenoisingRow {
  std::string snr;        // condition label
  double model_mse = 0.0;     // reconstruction vs clean
  double identity_mse = 0.0;  // noisy-as-reconstruction vs clean
};

struct RunResult {
  std::string system;  // display name
  MetricTables metrics;
  std::map<std::string, std::string> chosen_hyperparams;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
  std::vector<std::string> class_labels;
  std::vector<std::pair<std::string, double>> grid_record;  // point -> mean val loss
  std::vector<DenoisingRow> denoising;  // empty for the handcrafted system
  std::string protocol_note;
};

// Settings shared by every training in a run; the grid overrides individual
// fields per point.
struct HarnessOptions {
  TrainConfig train;
  int hidden_dim = 40;     // encoder hidden size (jRDAE/iRDAE)
  int time_hidden = 8;     // encoder hidden size of the transposed variant
  int encoder_depth = 1;
  int decoder_depth = 1;
  int snn_hidden_units = 1000;
  double snn_dropout = 0.30;
  double snn_l2 = 0.01;
  NormScope norm_scope = NormScope::kGlobal;  // mel caches; handcrafted is per-dim

  static HarnessOptions from_config(const KeyValueConfig& config);
};

// Full protocol for one system: fold plan, grid search over 3 inner
// rotations, final retrain on the 67% partition with the winning rotation's
// validation fold reserved for early stopping, and a single audited
// evaluation on the outer test set. Writes checkpoints and metrics.csv under
// out_dir when non-empty.
RunResult run_system(System system, FeatureStore& store, const GridSpec& grid,
                     const HarnessOptions& options, std::uint64_t seed,
                     const std::string& out_dir);

// Re-evaluates a saved checkpoint against a cache: predictions over the
// checkpoint's recorded outer test groups under its recorded normalization.
MetricTables evaluate_checkpoint(const std::string& checkpoint_path, FeatureStore& store);

// ---- Reports -------------------------------------------------------------------

// report.csv: one row per system x SNR condition, 6-decimal accuracies.
// report.md: comparison tables, chosen hyperparameters, protocol notes.
// Byte-deterministic given identical results.
void emit_report(const std::vector<RunResult>& results, const std::string& out_dir);

// Single-system metric CSV (same row format as report.csv).
void write_metrics_csv(const std::vector<RunResult>& results, const std::string& path);

// RunResult round trip (JSON file), the interchange between `train` runs and
// `compare`.
void save_run_result(const RunResult& result, const std::string& path);
RunResult load_run_result(const std::string& path);

// Parsed TrainConfig from flat config keys (epochs, batch_size,
// learning_rate, patience, loss_weight_lambda, seed, optimizer).
TrainConfig train_config_from(const KeyValueConfig& config);

}  // namespace rdae

#endif  // RDAE_HARNESS_HPP_
