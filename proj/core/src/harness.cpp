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

#include "rdae/harness.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <set>

#include <nlohmann/json.hpp>

#include "rdae/checkpoint.hpp"
#include "rdae/error.hpp"

namespace rdae {
namespace {

using nlohmann::json;

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string format_fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

}  // namespace

// ---- GridSpec ----------------------------------------------------------------

std::vector<GridSpec::Point> GridSpec::points() const {
  for (const auto& [axis, values] : axes) {
    if (values.empty()) {
      throw ArgumentError("grid axis '" + axis + "' has no values");
    }
  }
  std::size_t total = 1;
  for (const auto& [axis, values] : axes) total *= values.size();
  if (total > static_cast<std::size_t>(max_combinations)) {
    throw ArgumentError("grid has " + std::to_string(total) +
                        " combinations, budget is " + std::to_string(max_combinations));
  }

  std::vector<Point> out;
  out.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    Point p;
    // Last axis varies fastest so points come out in lexicographic order of
    // the sorted axis names.
    std::size_t rem = idx;
    std::size_t scale = total;
    for (const auto& [axis, values] : axes) {
      scale /= values.size();
      p[axis] = values[rem / scale];
      rem %= scale;
    }
    out.push_back(std::move(p));
  }
  return out;
}

GridSpec GridSpec::from_config(const KeyValueConfig& config) {
  GridSpec grid;
  grid.max_combinations =
      static_cast<int>(config.get_int_or("grid.max_combinations", 64));
  for (const std::string& key : config.keys()) {
    if (key.rfind("grid.", 0) != 0 || key == "grid.max_combinations") continue;
    const std::string axis = key.substr(5);
    if (axis.empty()) throw DataError("config: empty grid axis name in '" + key + "'");
    grid.axes[axis] = config.get_real_list(key);
  }
  return grid;
}

std::string format_grid_point(const GridSpec::Point& point) {
  if (point.empty()) return "(defaults)";
  std::string out;
  for (const auto& [axis, value] : point) {
    if (!out.empty()) out += ";";
    out += axis + "=" + format_real(value);
  }
  return out;
}

// ---- FeatureStore --------------------------------------------------------------

FeatureStore::FeatureStore(const std::string& cache_path) {
  FeatureCacheReader reader(cache_path);
  header_ = reader.header();
  for (std::size_t i = 0; i < reader.size(); ++i) {
    CacheRecord rec = reader.read_index(i);
    Group& g = groups_[rec.meta.group_key];
    if (g.versions.empty()) {
      g.group_key = rec.meta.group_key;
      g.speaker_id = rec.meta.speaker_id;
    } else if (g.speaker_id != rec.meta.speaker_id) {
      throw DataError("feature cache: group '" + rec.meta.group_key +
                      "' has inconsistent speakers '" + g.speaker_id + "' and '" +
                      rec.meta.speaker_id + "'");
    }
    g.versions.push_back({std::move(rec.meta), std::move(rec.features)});
  }
  if (groups_.empty()) throw DataError("feature cache is empty: " + cache_path);

  std::set<std::string> speaker_set;
  for (auto& [key, g] : groups_) {
    std::sort(g.versions.begin(), g.versions.end(),
              [](const Version& a, const Version& b) {
                // Clean (no noise, no snr) sorts first, then by (noise, snr).
                const bool ac = !a.meta.noise_name && !a.meta.snr_db;
                const bool bc = !b.meta.noise_name && !b.meta.snr_db;
                if (ac != bc) return ac;
                const std::string an = a.meta.noise_name.value_or("");
                const std::string bn = b.meta.noise_name.value_or("");
                if (an != bn) return an < bn;
                return a.meta.snr_db.value_or(0) < b.meta.snr_db.value_or(0);
              });
    for (std::size_t i = 0; i < g.versions.size(); ++i) {
      if (!g.versions[i].meta.noise_name && !g.versions[i].meta.snr_db) {
        g.clean_index = static_cast<int>(i);
        break;
      }
    }
    group_keys_.push_back(key);
    speaker_set.insert(g.speaker_id);
    reads_[key] = 0;
  }
  speakers_.assign(speaker_set.begin(), speaker_set.end());
}

std::vector<GroupInfo> FeatureStore::group_infos() const {
  std::vector<GroupInfo> out;
  out.reserve(groups_.size());
  for (const auto& [key, g] : groups_) out.push_back({key, g.speaker_id});
  return out;
}

const FeatureStore::Group& FeatureStore::group(const std::string& key) {
  const auto it = groups_.find(key);
  if (it == groups_.end()) {
    throw ArgumentError("feature store: unknown group '" + key + "'");
  }
  ++reads_[key];
  return it->second;
}

std::int64_t FeatureStore::read_count(const std::string& key) const {
  const auto it = reads_.find(key);
  if (it == reads_.end()) {
    throw ArgumentError("feature store: unknown group '" + key + "'");
  }
  return it->second;
}

void FeatureStore::reset_read_counts() {
  for (auto& [key, count] : reads_) count = 0;
}

// ---- Systems ---------------------------------------------------------------------

System parse_system(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "jrdae") return System::kJrdae;
  if (lower == "irdae") return System::kIrdae;
  if (lower == "trdae") return System::kTrdae;
  if (lower == "handcrafted") return System::kHandcrafted;
  throw ArgumentError("unknown system '" + name +
                      "' (expected jrdae, irdae, trdae or handcrafted)");
}

std::string system_display_name(System s) {
  switch (s) {
    case System::kJrdae: return "jRDAE";
    case System::kIrdae: return "iRDAE";
    case System::kTrdae: return "tRDAE";
    case System::kHandcrafted: return "handcrafted";
  }
  throw ArgumentError("invalid system enum");
}

// ---- Config parsing -----------------------------------------------------------------

TrainConfig train_config_from(const KeyValueConfig& config) {
  TrainConfig c;
  c.epochs = static_cast<int>(config.get_int_or("epochs", c.epochs));
  c.batch_size = static_cast<int>(config.get_int_or("batch_size", c.batch_size));
  c.learning_rate = config.get_real_or("learning_rate", c.learning_rate);
  c.patience = static_cast<int>(config.get_int_or("patience", c.patience));
  c.loss_weight_lambda = config.get_real_or("loss_weight_lambda", c.loss_weight_lambda);
  c.seed = static_cast<std::uint64_t>(config.get_int_or("seed", 0));
  const std::string opt = config.get_string_or("optimizer", "adam");
  if (opt == "adam") {
    c.optimizer = OptimizerKind::kAdam;
  } else if (opt == "sgd") {
    c.optimizer = OptimizerKind::kSgd;
  } else {
    throw DataError("config key 'optimizer': expected adam or sgd, got '" + opt + "'");
  }
  c.validate();
  return c;
}

HarnessOptions HarnessOptions::from_config(const KeyValueConfig& config) {
  HarnessOptions o;
  o.train = train_config_from(config);
  o.hidden_dim = static_cast<int>(config.get_int_or("hidden_dim", o.hidden_dim));
  o.time_hidden = static_cast<int>(config.get_int_or("time_hidden", o.time_hidden));
  o.encoder_depth = static_cast<int>(config.get_int_or("encoder_depth", o.encoder_depth));
  o.decoder_depth = static_cast<int>(config.get_int_or("decoder_depth", o.decoder_depth));
  o.snn_hidden_units =
      static_cast<int>(config.get_int_or("snn_hidden_units", o.snn_hidden_units));
  o.snn_dropout = config.get_real_or("snn_dropout", o.snn_dropout);
  o.snn_l2 = config.get_real_or("snn_l2", o.snn_l2);
  const std::string scope = config.get_string_or("norm_scope", "global");
  if (scope == "global") {
    o.norm_scope = NormScope::kGlobal;
  } else if (scope == "per_band") {
    o.norm_scope = NormScope::kPerBand;
  } else {
    throw DataError("config key 'norm_scope': expected global or per_band, got '" +
                    scope + "'");
  }
  return o;
}

// ---- Internal machinery ----------------------------------------------------------

namespace {

bool is_neural(System s) { return s != System::kHandcrafted; }

// Lowercase spelling used in config files, CLI flags and checkpoints.
std::string system_config_name(System s) {
  switch (s) {
    case System::kJrdae: return "jrdae";
    case System::kIrdae: return "irdae";
    case System::kTrdae: return "trdae";
    case System::kHandcrafted: return "handcrafted";
  }
  throw ArgumentError("invalid system enum");
}

// Axes each system's grid may sweep.
const std::vector<std::string>& applicable_axes(System s) {
  static const std::vector<std::string> jrdae = {"hidden_dim", "lambda", "learning_rate"};
  static const std::vector<std::string> irdae = {"hidden_dim", "learning_rate"};
  static const std::vector<std::string> trdae = {"lambda", "learning_rate", "time_hidden"};
  static const std::vector<std::string> hand = {"learning_rate"};
  switch (s) {
    case System::kJrdae: return jrdae;
    case System::kIrdae: return irdae;
    case System::kTrdae: return trdae;
    case System::kHandcrafted: return hand;
  }
  throw ArgumentError("invalid system enum");
}

struct Effective {
  TrainConfig config;
  int hidden_dim = 0;   // encoder hidden size actually used
  double lambda = 1.0;  // joint loss weight actually used
};

Effective apply_point(const HarnessOptions& options, System system,
                      const GridSpec::Point& point) {
  const std::vector<std::string>& allowed = applicable_axes(system);
  for (const auto& [axis, value] : point) {
    if (std::find(allowed.begin(), allowed.end(), axis) == allowed.end()) {
      throw ArgumentError("grid axis '" + axis + "' is not applicable to system " +
                          system_display_name(system));
    }
  }
  Effective e;
  e.config = options.train;
  e.hidden_dim = system == System::kTrdae ? options.time_hidden : options.hidden_dim;
  const auto get = [&point](const std::string& axis, double fallback) {
    const auto it = point.find(axis);
    return it == point.end() ? fallback : it->second;
  };
  e.config.learning_rate = get("learning_rate", e.config.learning_rate);
  e.config.loss_weight_lambda = get("lambda", e.config.loss_weight_lambda);
  e.lambda = e.config.loss_weight_lambda;
  e.hidden_dim = static_cast<int>(
      get(system == System::kTrdae ? "time_hidden" : "hidden_dim",
          static_cast<double>(e.hidden_dim)));
  if (e.hidden_dim <= 0) throw ArgumentError("grid: hidden size must be positive");
  return e;
}

// Normalization fit over every version of the given groups, in deterministic
// (sorted group, sorted version) order.
NormStats fit_norm_for(FeatureStore& store, const std::vector<std::string>& keys,
                       NormScope scope, const std::string& origin) {
  std::vector<const Eigen::MatrixXd*> mats;
  for (const std::string& key : keys) {
    for (const FeatureStore::Version& v : store.group(key).versions) {
      mats.push_back(&v.features);
    }
  }
  NormStats stats = fit_norm_stats(mats, scope);
  stats.origin = origin;
  return stats;
}

std::map<std::string, int> label_index_of(const std::vector<std::string>& speakers) {
  std::map<std::string, int> out;
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    out[speakers[i]] = static_cast<int>(i);
  }
  return out;
}

Eigen::MatrixXd prepare_input(const Eigen::MatrixXd& features, const NormStats& norm,
                              bool transpose) {
  Eigen::MatrixXd x = apply_norm(features, norm);
  if (transpose) x.transposeInPlace();
  return x;
}

// (noisy, clean, label) triples for the RDAE systems; every version becomes
// one sample whose clean target is the group's clean version.
JointDataset build_joint_dataset(FeatureStore& store, const std::vector<std::string>& keys,
                                 const std::map<std::string, int>& label_of,
                                 const NormStats& norm, bool transpose) {
  JointDataset data;
  for (const std::string& key : keys) {
    const FeatureStore::Group& g = store.group(key);
    if (g.clean_index < 0) {
      throw DataError("group '" + key + "' has no clean version; cannot build "
                      "denoising targets");
    }
    const Eigen::MatrixXd clean = prepare_input(
        g.versions[static_cast<std::size_t>(g.clean_index)].features, norm, transpose);
    const int label = label_of.at(g.speaker_id);
    for (const FeatureStore::Version& v : g.versions) {
      data.push_back({prepare_input(v.features, norm, transpose), clean, label});
    }
  }
  return data;
}

// Row-per-version matrix for the handcrafted system (features are 1 x dim).
EmbeddingDataset build_vector_dataset(FeatureStore& store,
                                      const std::vector<std::string>& keys,
                                      const std::map<std::string, int>& label_of,
                                      const NormStats& norm) {
  std::size_t count = 0;
  for (const std::string& key : keys) count += store.group(key).versions.size();

  EmbeddingDataset data;
  const Eigen::Index dim = store.group(keys.front()).versions.front().features.cols();
  data.x.resize(static_cast<Eigen::Index>(count), dim);
  data.labels.reserve(count);
  Eigen::Index row = 0;
  for (const std::string& key : keys) {
    const FeatureStore::Group& g = store.group(key);
    const int label = label_of.at(g.speaker_id);
    for (const FeatureStore::Version& v : g.versions) {
      data.x.row(row++) = apply_norm(v.features, norm).row(0);
      data.labels.push_back(label);
    }
  }
  return data;
}

// Eval-mode embedding extraction for a joint dataset (iRDAE stage 2).
EmbeddingDataset extract_embeddings(const RdaeModel& model, const JointDataset& data,
                                    int batch_size) {
  EmbeddingDataset out;
  out.x.resize(static_cast<Eigen::Index>(data.size()), model.options().embedding_dim());
  out.labels.reserve(data.size());
  for (std::size_t start = 0; start < data.size();
       start += static_cast<std::size_t>(batch_size)) {
    const std::size_t count =
        std::min(static_cast<std::size_t>(batch_size), data.size() - start);
    std::vector<const Eigen::MatrixXd*> ptrs;
    ptrs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) ptrs.push_back(&data[start + i].noisy);
    out.x.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(count)) =
        model.embed(to_batch_sequence(ptrs));
  }
  for (const JointSample& s : data) out.labels.push_back(s.label);
  return out;
}

struct TrainOutcome {
  double val_loss = std::numeric_limits<double>::quiet_NaN();
  std::unique_ptr<JointModel> joint;   // jrdae / trdae
  std::unique_ptr<RdaeModel> rdae;     // irdae stage 1
  std::unique_ptr<SnnClassifier> snn;  // irdae stage 2 / handcrafted
  NormStats norm;
  TrainHistory history;                // primary training (classifier for irdae)
  TrainHistory stage1_history;         // irdae stage 1
  Effective effective;
};

TrainOutcome train_once(System system, FeatureStore& store,
                        const std::vector<std::string>& train_keys,
                        const std::vector<std::string>& val_keys,
                        const std::map<std::string, int>& label_of,
                        const HarnessOptions& options, const Effective& effective,
                        std::uint64_t train_seed, const std::string& origin) {
  TrainOutcome out;
  out.effective = effective;
  const int num_classes = static_cast<int>(label_of.size());
  TrainConfig cfg = effective.config;
  cfg.seed = train_seed;

  if (system == System::kHandcrafted) {
    out.norm = fit_norm_for(store, train_keys, NormScope::kPerBand, origin);
    const EmbeddingDataset train = build_vector_dataset(store, train_keys, label_of, out.norm);
    const EmbeddingDataset val = build_vector_dataset(store, val_keys, label_of, out.norm);
    SnnOptions sopts{static_cast<int>(train.x.cols()), options.snn_hidden_units,
                     num_classes, options.snn_dropout, options.snn_l2};
    Rng init(stream_seed(train_seed, "init"));
    out.snn = std::make_unique<SnnClassifier>(sopts, init);
    SnnTrainDriver driver(*out.snn, train, val, cfg);
    out.history = train_loop(driver, cfg);
    out.val_loss = out.history.best_val_loss;
    return out;
  }

  const bool transpose = system == System::kTrdae;
  out.norm = fit_norm_for(store, train_keys, options.norm_scope, origin);
  const JointDataset train =
      build_joint_dataset(store, train_keys, label_of, out.norm, transpose);
  const JointDataset val =
      build_joint_dataset(store, val_keys, label_of, out.norm, transpose);

  RdaeOptions ropts;
  ropts.num_timesteps = static_cast<int>(train.front().noisy.rows());
  ropts.input_dim = static_cast<int>(train.front().noisy.cols());
  ropts.hidden_dim = effective.hidden_dim;
  ropts.encoder_depth = options.encoder_depth;
  ropts.decoder_depth = options.decoder_depth;
  SnnOptions sopts{ropts.embedding_dim(), options.snn_hidden_units, num_classes,
                   options.snn_dropout, options.snn_l2};

  if (system == System::kIrdae) {
    // Stage 1: reconstruction-only RDAE to its own early-stopping optimum.
    Rng init(stream_seed(train_seed, "init"));
    out.rdae = std::make_unique<RdaeModel>(ropts, init);
    RdaeTrainDriver stage1(*out.rdae, train, val, cfg);
    out.stage1_history = train_loop(stage1, cfg);

    // Stage 2: frozen encoder, classifier trained on extracted embeddings.
    const EmbeddingDataset etrain = extract_embeddings(*out.rdae, train, cfg.batch_size);
    const EmbeddingDataset eval_set = extract_embeddings(*out.rdae, val, cfg.batch_size);
    Rng init2(stream_seed(train_seed, "init_snn"));
    out.snn = std::make_unique<SnnClassifier>(sopts, init2);
    TrainConfig cfg2 = cfg;
    cfg2.seed = stream_seed(train_seed, "stage2");
    SnnTrainDriver stage2(*out.snn, etrain, eval_set, cfg2);
    out.history = train_loop(stage2, cfg2);
    out.val_loss = out.history.best_val_loss;
    return out;
  }

  JointOptions jopts;
  jopts.rdae = ropts;
  jopts.snn = sopts;
  jopts.lambda = effective.lambda;
  Rng init(stream_seed(train_seed, "init"));
  out.joint = std::make_unique<JointModel>(jopts, init);
  JointTrainDriver driver(*out.joint, train, val, cfg);
  out.history = train_loop(driver, cfg);
  out.val_loss = out.history.best_val_loss;
  return out;
}

struct EvalModel {
  const RdaeModel* rdae = nullptr;      // null for the handcrafted system
  const SnnClassifier* snn = nullptr;
  bool transpose = false;
  const NormStats* norm = nullptr;
};

void predict_groups(const EvalModel& model, FeatureStore& store,
                    const std::vector<std::string>& keys,
                    const std::map<std::string, int>& label_of, int batch_size,
                    std::vector<int>* predictions, std::vector<int>* labels,
                    std::vector<Condition>* conditions) {
  std::vector<Eigen::MatrixXd> inputs;
  for (const std::string& key : keys) {
    const FeatureStore::Group& g = store.group(key);
    const auto it = label_of.find(g.speaker_id);
    if (it == label_of.end()) {
      throw DataError("speaker '" + g.speaker_id + "' is not among the trained classes");
    }
    for (const FeatureStore::Version& v : g.versions) {
      inputs.push_back(prepare_input(v.features, *model.norm, model.transpose));
      labels->push_back(it->second);
      conditions->push_back({v.meta.noise_name, v.meta.snr_db});
    }
  }

  for (std::size_t start = 0; start < inputs.size();
       start += static_cast<std::size_t>(batch_size)) {
    const std::size_t count =
        std::min(static_cast<std::size_t>(batch_size), inputs.size() - start);
    Eigen::MatrixXd embeddings;
    if (model.rdae) {
      std::vector<const Eigen::MatrixXd*> ptrs;
      ptrs.reserve(count);
      for (std::size_t i = 0; i < count; ++i) ptrs.push_back(&inputs[start + i]);
      embeddings = model.rdae->embed(to_batch_sequence(ptrs));
    } else {
      embeddings.resize(static_cast<Eigen::Index>(count), inputs.front().cols());
      for (std::size_t i = 0; i < count; ++i) embeddings.row(static_cast<Eigen::Index>(i)) = inputs[start + i].row(0);
    }
    const Eigen::MatrixXd probs = model.snn->forward(embeddings, /*training=*/false, nullptr);
    for (Eigen::Index r = 0; r < probs.rows(); ++r) {
      Eigen::Index arg = 0;
      probs.row(r).maxCoeff(&arg);
      predictions->push_back(static_cast<int>(arg));
    }
  }
}

// Reconstruction quality on a validation fold, bucketed by SNR condition:
// the model's MSE against the clean target versus the identity baseline
// (noisy input used as its own reconstruction).
std::vector<DenoisingRow> denoising_rows(const RdaeModel& model, FeatureStore& store,
                                         const std::vector<std::string>& keys,
                                         const NormStats& norm, bool transpose,
                                         int batch_size) {
  struct Bucket {
    double model_sq = 0.0;
    double identity_sq = 0.0;
    std::size_t count = 0;
  };
  std::map<std::optional<int>, Bucket> buckets;

  std::vector<Eigen::MatrixXd> noisy, clean;
  std::vector<std::optional<int>> snrs;
  for (const std::string& key : keys) {
    const FeatureStore::Group& g = store.group(key);
    if (g.clean_index < 0) continue;
    const Eigen::MatrixXd c = prepare_input(
        g.versions[static_cast<std::size_t>(g.clean_index)].features, norm, transpose);
    for (const FeatureStore::Version& v : g.versions) {
      noisy.push_back(prepare_input(v.features, norm, transpose));
      clean.push_back(c);
      snrs.push_back(v.meta.snr_db);
    }
  }

  for (std::size_t start = 0; start < noisy.size();
       start += static_cast<std::size_t>(batch_size)) {
    const std::size_t count = std::min(static_cast<std::size_t>(batch_size), noisy.size() - start);
    std::vector<const Eigen::MatrixXd*> ptrs;
    ptrs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) ptrs.push_back(&noisy[start + i]);
    const RdaeModel::Forward fwd = model.forward(to_batch_sequence(ptrs));
    for (std::size_t i = 0; i < count; ++i) {
      const Eigen::MatrixXd& target = clean[start + i];
      const Eigen::MatrixXd& input = noisy[start + i];
      double model_sq = 0.0;
      for (std::size_t t = 0; t < fwd.recon.size(); ++t) {
        model_sq += (fwd.recon[t].row(static_cast<Eigen::Index>(i)) -
                     target.row(static_cast<Eigen::Index>(t)))
                        .squaredNorm();
      }
      Bucket& b = buckets[snrs[start + i]];
      b.model_sq += model_sq / static_cast<double>(target.size());
      b.identity_sq += (input - target).squaredNorm() / static_cast<double>(target.size());
      ++b.count;
    }
  }

  // Canonical order: clean first, then descending SNR.
  std::vector<std::optional<int>> keys_sorted;
  for (const auto& [k, b] : buckets) keys_sorted.push_back(k);
  std::sort(keys_sorted.begin(), keys_sorted.end(),
            [](const std::optional<int>& a, const std::optional<int>& b) {
              if (!a) return b.has_value();
              if (!b) return false;
              return *a > *b;
            });
  std::vector<DenoisingRow> rows;
  for (const auto& k : keys_sorted) {
    const Bucket& b = buckets[k];
    rows.push_back({snr_label(k), b.model_sq / static_cast<double>(b.count),
                    b.identity_sq / static_cast<double>(b.count)});
  }
  return rows;
}

std::vector<std::string> merge_sorted(const std::vector<std::string>& a,
                                      const std::vector<std::string>& b) {
  std::vector<std::string> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Lexicographic comparison of hyperparameter tuples in sorted-axis order.
bool point_less(const GridSpec::Point& a, const GridSpec::Point& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
    if (ia->second < ib->second) return true;
    if (ia->second > ib->second) return false;
  }
  return false;
}

CheckpointHeader make_header(System system, const TrainOutcome& outcome,
                             const HarnessOptions& options, std::uint64_t seed,
                             const GridSpec::Point& chosen,
                             const std::vector<std::string>& class_labels,
                             const std::vector<std::string>& outer_test,
                             const std::string& kind) {
  CheckpointHeader h;
  h.system = system_config_name(system);
  h.kind = kind;
  if (outcome.joint) {
    h.has_rdae = true;
    h.rdae = outcome.joint->options().rdae;
    h.has_snn = true;
    h.snn = outcome.joint->options().snn;
    h.lambda = outcome.joint->options().lambda;
  } else {
    if (outcome.rdae && kind != "snn") {
      h.has_rdae = true;
      h.rdae = outcome.rdae->options();
    }
    if (outcome.snn && kind != "rdae") {
      h.has_snn = true;
      h.snn = outcome.snn->options();
    }
    h.lambda = 0.0;
  }
  h.train_config = outcome.effective.config;
  h.train_config.seed = seed;  // master seed; per-training streams derive from it
  h.best_epoch = outcome.history.best_epoch;
  h.best_val_loss = outcome.history.best_val_loss;
  h.norm = outcome.norm;
  h.class_labels = class_labels;
  h.outer_test_groups = outer_test;
  for (const auto& [axis, value] : chosen) h.hyperparams[axis] = format_real(value);
  return h;
}

}  // namespace

std::size_t select_grid_point(const std::vector<GridSpec::Point>& points,
                              const std::vector<double>& mean_losses) {
  if (points.size() != mean_losses.size() || points.empty()) {
    throw ArgumentError("select_grid_point: points and losses must align and be non-empty");
  }
  std::size_t best = points.size();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (std::isnan(mean_losses[i])) continue;
    if (best == points.size() || mean_losses[i] < mean_losses[best] ||
        (mean_losses[i] == mean_losses[best] && point_less(points[i], points[best]))) {
      best = i;
    }
  }
  if (best == points.size()) {
    throw NumericError("grid search: all " + std::to_string(points.size()) +
                       " grid points diverged");
  }
  return best;
}

// ---- run_system ---------------------------------------------------------------------

RunResult run_system(System system, FeatureStore& store, const GridSpec& grid,
                     const HarnessOptions& options, std::uint64_t seed,
                     const std::string& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();

  const std::string& kind = store.header().kind;
  if (is_neural(system) && kind != "mel") {
    throw ArgumentError("system " + system_display_name(system) +
                        " requires a mel feature cache, got kind '" + kind + "'");
  }
  if (system == System::kHandcrafted && kind != "handcrafted") {
    throw ArgumentError("the handcrafted system requires a handcrafted feature cache, "
                        "got kind '" + kind + "'");
  }

  store.reset_read_counts();
  const FoldPlan plan = make_fold_plan(store.group_infos(), seed);
  const std::map<std::string, int> label_of = label_index_of(store.speakers());

  const std::vector<GridSpec::Point> points = grid.points();
  for (const GridSpec::Point& p : points) (void)apply_point(options, system, p);

  // Grid search: 3 inner rotations per point; divergent points are excluded.
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> mean_losses(points.size(), kNaN);
  std::vector<std::array<double, 3>> rotation_losses(
      points.size(), {kNaN, kNaN, kNaN});
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Effective effective = apply_point(options, system, points[i]);
    try {
      double sum = 0.0;
      for (int r = 0; r < 3; ++r) {
        const std::vector<std::string> train_keys = merge_sorted(
            plan.inner[static_cast<std::size_t>((r + 1) % 3)],
            plan.inner[static_cast<std::size_t>((r + 2) % 3)]);
        const std::vector<std::string>& val_keys = plan.inner[static_cast<std::size_t>(r)];
        const std::string tag =
            "grid" + std::to_string(i) + "/fold" + std::to_string(r);
        const TrainOutcome outcome =
            train_once(system, store, train_keys, val_keys, label_of, options, effective,
                       stream_seed(seed, tag), "seed" + std::to_string(seed) + "/" + tag + "/train");
        if (!std::isfinite(outcome.val_loss)) {
          throw NumericError("non-finite validation loss");
        }
        rotation_losses[i][static_cast<std::size_t>(r)] = outcome.val_loss;
        sum += outcome.val_loss;
      }
      mean_losses[i] = sum / 3.0;
    } catch (const NumericError&) {
      mean_losses[i] = kNaN;  // divergent point: excluded from selection
    }
  }

  const std::size_t best = select_grid_point(points, mean_losses);

  // Final retrain on the 67% partition: the winning rotation's validation
  // fold stays reserved for early stopping, the other two folds train.
  int chosen_rotation = 0;
  for (int r = 1; r < 3; ++r) {
    if (rotation_losses[best][static_cast<std::size_t>(r)] <
        rotation_losses[best][static_cast<std::size_t>(chosen_rotation)]) {
      chosen_rotation = r;
    }
  }
  const std::vector<std::string> final_train = merge_sorted(
      plan.inner[static_cast<std::size_t>((chosen_rotation + 1) % 3)],
      plan.inner[static_cast<std::size_t>((chosen_rotation + 2) % 3)]);
  const std::vector<std::string>& final_val =
      plan.inner[static_cast<std::size_t>(chosen_rotation)];
  const Effective chosen_effective = apply_point(options, system, points[best]);
  const TrainOutcome final_outcome =
      train_once(system, store, final_train, final_val, label_of, options,
                 chosen_effective, stream_seed(seed, "final"),
                 "seed" + std::to_string(seed) + "/final/train");

  RunResult result;
  result.system = system_display_name(system);
  result.seed = seed;
  result.class_labels = store.speakers();
  for (std::size_t i = 0; i < points.size(); ++i) {
    result.grid_record.emplace_back(format_grid_point(points[i]), mean_losses[i]);
  }
  for (const auto& [axis, value] : points[best]) {
    result.chosen_hyperparams[axis] = format_real(value);
  }
  result.protocol_note =
      "Grid selection: argmin of the mean validation loss over 3 inner-fold "
      "rotations. Final retraining uses the full 67% training partition with "
      "inner fold " + std::to_string(chosen_rotation) +
      " (the winning rotation's validation fold) reserved for early stopping; "
      "normalization statistics are refit on each training subset.";

  if (is_neural(system)) {
    const RdaeModel& rdae_ref =
        final_outcome.joint ? final_outcome.joint->rdae() : *final_outcome.rdae;
    result.denoising =
        denoising_rows(rdae_ref, store, final_val, final_outcome.norm,
                       system == System::kTrdae, options.train.batch_size);
  }

  // Leakage audit: the outer test set must be untouched up to this point.
  for (const std::string& key : plan.outer_test) {
    if (store.read_count(key) != 0) {
      throw Error("leakage: outer test group '" + key + "' was read " +
                  std::to_string(store.read_count(key)) + " times before evaluation");
    }
  }

  EvalModel eval;
  eval.rdae = final_outcome.joint ? &final_outcome.joint->rdae() : final_outcome.rdae.get();
  eval.snn = final_outcome.joint ? &final_outcome.joint->snn() : final_outcome.snn.get();
  eval.transpose = system == System::kTrdae;
  eval.norm = &final_outcome.norm;
  std::vector<int> predictions, labels;
  std::vector<Condition> conditions;
  predict_groups(eval, store, plan.outer_test, label_of, options.train.batch_size,
                 &predictions, &labels, &conditions);
  result.metrics = compute_metrics(predictions, labels, conditions,
                                   static_cast<int>(label_of.size()));

  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::string lower = system_config_name(system);
    if (system == System::kIrdae) {
      CheckpointHeader h1 = make_header(system, final_outcome, options, seed, points[best],
                                        store.speakers(), plan.outer_test, "rdae");
      h1.best_epoch = final_outcome.stage1_history.best_epoch;
      h1.best_val_loss = final_outcome.stage1_history.best_val_loss;
      save_checkpoint(out_dir + "/irdae_stage1.ckpt", h1, final_outcome.rdae->params());

      CheckpointHeader h2 = make_header(system, final_outcome, options, seed, points[best],
                                        store.speakers(), plan.outer_test, "joint");
      std::vector<ParamRef> both = final_outcome.rdae->params();
      for (ParamRef& p : final_outcome.snn->params()) both.push_back(p);
      save_checkpoint(out_dir + "/irdae_stage2.ckpt", h2, both);
    } else if (system == System::kHandcrafted) {
      const CheckpointHeader h = make_header(system, final_outcome, options, seed,
                                             points[best], store.speakers(),
                                             plan.outer_test, "snn");
      save_checkpoint(out_dir + "/handcrafted.ckpt", h, final_outcome.snn->params());
    } else {
      const CheckpointHeader h = make_header(system, final_outcome, options, seed,
                                             points[best], store.speakers(),
                                             plan.outer_test, "joint");
      save_checkpoint(out_dir + "/" + lower + ".ckpt", h, final_outcome.joint->params());
    }
    write_metrics_csv({result}, out_dir + "/metrics.csv");
    save_run_result(result, out_dir + "/" + lower + "_result.json");
  }
  return result;
}

// ---- evaluate_checkpoint ------------------------------------------------------------

MetricTables evaluate_checkpoint(const std::string& checkpoint_path, FeatureStore& store) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  const System system = parse_system(ckpt.header.system);
  if (ckpt.header.kind == "rdae") {
    throw DataError("checkpoint '" + checkpoint_path +
                    "' holds only the stage-1 RDAE; evaluate the stage-2 checkpoint");
  }
  if (is_neural(system) && store.header().kind != "mel") {
    throw ArgumentError("checkpoint expects a mel feature cache, got kind '" +
                        store.header().kind + "'");
  }
  if (system == System::kHandcrafted && store.header().kind != "handcrafted") {
    throw ArgumentError("checkpoint expects a handcrafted feature cache, got kind '" +
                        store.header().kind + "'");
  }
  if (ckpt.header.outer_test_groups.empty()) {
    throw DataError("checkpoint records no outer test groups");
  }

  std::map<std::string, int> label_of;
  for (std::size_t i = 0; i < ckpt.header.class_labels.size(); ++i) {
    label_of[ckpt.header.class_labels[i]] = static_cast<int>(i);
  }

  // Keep whichever components exist alive for the prediction pass.
  std::unique_ptr<JointModel> joint;
  std::unique_ptr<SnnClassifier> snn;
  EvalModel eval;
  eval.transpose = system == System::kTrdae;
  eval.norm = &ckpt.header.norm;
  if (ckpt.header.kind == "joint") {
    joint = std::make_unique<JointModel>(rebuild_joint(ckpt));
    eval.rdae = &joint->rdae();
    eval.snn = &joint->snn();
  } else if (ckpt.header.kind == "snn") {
    snn = std::make_unique<SnnClassifier>(rebuild_snn(ckpt));
    eval.snn = snn.get();
  } else {
    throw DataError("checkpoint kind '" + ckpt.header.kind + "' is not evaluable");
  }

  std::vector<int> predictions, labels;
  std::vector<Condition> conditions;
  predict_groups(eval, store, ckpt.header.outer_test_groups, label_of,
                 ckpt.header.train_config.batch_size, &predictions, &labels, &conditions);
  return compute_metrics(predictions, labels, conditions,
                         static_cast<int>(ckpt.header.class_labels.size()));
}

// ---- Reports ---------------------------------------------------------------------------

namespace {

// Canonical system order for reports.
int system_rank(const std::string& name) {
  if (name == "jRDAE") return 0;
  if (name == "iRDAE") return 1;
  if (name == "tRDAE") return 2;
  if (name == "handcrafted") return 3;
  return 4;
}

std::vector<const RunResult*> sorted_results(const std::vector<RunResult>& results) {
  std::vector<const RunResult*> out;
  out.reserve(results.size());
  for (const RunResult& r : results) out.push_back(&r);
  std::stable_sort(out.begin(), out.end(), [](const RunResult* a, const RunResult* b) {
    const int ra = system_rank(a->system);
    const int rb = system_rank(b->system);
    return ra != rb ? ra < rb : a->system < b->system;
  });
  return out;
}

}  // namespace

void write_metrics_csv(const std::vector<RunResult>& results, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open metrics CSV for writing: " + path);
  out << "system,condition,total,correct,accuracy\n";
  for (const RunResult* r : sorted_results(results)) {
    for (const ConditionAccuracy& c : r->metrics.per_snr) {
      out << r->system << ',' << c.condition << ',' << c.total << ',' << c.correct << ','
          << format_fixed(c.accuracy, 6) << '\n';
    }
  }
  if (!out) throw IoError("short write to metrics CSV: " + path);
}

void emit_report(const std::vector<RunResult>& results, const std::string& out_dir) {
  if (results.empty()) throw ArgumentError("emit_report: no results");
  std::filesystem::create_directories(out_dir);
  write_metrics_csv(results, out_dir + "/report.csv");

  const std::vector<const RunResult*> ordered = sorted_results(results);

  // Column set: union of SNR conditions in canonical (first-seen) order —
  // every run over the same corpus shares the same conditions.
  std::vector<std::string> conditions;
  for (const RunResult* r : ordered) {
    for (const ConditionAccuracy& c : r->metrics.per_snr) {
      if (std::find(conditions.begin(), conditions.end(), c.condition) == conditions.end()) {
        conditions.push_back(c.condition);
      }
    }
  }

  std::ofstream md(out_dir + "/report.md", std::ios::trunc);
  if (!md) throw IoError("cannot open report for writing: " + out_dir + "/report.md");

  md << "# Speaker identification comparison\n\n";
  md << "Accuracy by SNR condition (columns) for each system (rows).\n\n";
  md << "| system |";
  for (const std::string& c : conditions) md << ' ' << c << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < conditions.size(); ++i) md << "---|";
  md << '\n';
  for (const RunResult* r : ordered) {
    md << "| " << r->system << " |";
    for (const std::string& cond : conditions) {
      const auto it = std::find_if(r->metrics.per_snr.begin(), r->metrics.per_snr.end(),
                                   [&](const ConditionAccuracy& c) { return c.condition == cond; });
      if (it == r->metrics.per_snr.end()) {
        md << " - |";
      } else {
        md << ' ' << format_fixed(it->accuracy, 3) << " |";
      }
    }
    md << '\n';
  }

  md << "\n## Overall\n\n| system | accuracy | macro-F1 | seed | wall time (s) |\n"
     << "|---|---|---|---|---|\n";
  for (const RunResult* r : ordered) {
    md << "| " << r->system << " | " << format_fixed(r->metrics.accuracy, 3) << " | "
       << format_fixed(r->metrics.macro_f1, 3) << " | " << r->seed << " | "
       << format_fixed(r->wall_time_s, 1) << " |\n";
  }

  md << "\n## Accuracy by noise\n\n";
  for (const RunResult* r : ordered) {
    md << "- **" << r->system << "**:";
    for (const ConditionAccuracy& c : r->metrics.per_noise) {
      md << ' ' << c.condition << "=" << format_fixed(c.accuracy, 3);
    }
    md << '\n';
  }

  md << "\n## Chosen hyperparameters\n\n";
  for (const RunResult* r : ordered) {
    md << "- **" << r->system << "**: ";
    if (r->chosen_hyperparams.empty()) {
      md << "(defaults)";
    } else {
      bool first = true;
      for (const auto& [axis, value] : r->chosen_hyperparams) {
        if (!first) md << ", ";
        md << axis << "=" << value;
        first = false;
      }
    }
    md << '\n';
  }

  bool any_denoise = false;
  for (const RunResult* r : ordered) any_denoise = any_denoise || !r->denoising.empty();
  if (any_denoise) {
    md << "\n## Denoising (validation reconstruction MSE vs identity baseline)\n\n";
    md << "| system | condition | model MSE | identity MSE |\n|---|---|---|---|\n";
    for (const RunResult* r : ordered) {
      for (const DenoisingRow& d : r->denoising) {
        md << "| " << r->system << " | " << d.snr << " | "
           << format_fixed(d.model_mse, 6) << " | " << format_fixed(d.identity_mse, 6)
           << " |\n";
      }
    }
  }

  md << "\n## Protocol\n\n";
  for (const RunResult* r : ordered) {
    md << "- **" << r->system << "**: " << r->protocol_note << '\n';
  }
  md << "\n## Grid record (mean inner validation loss)\n\n";
  for (const RunResult* r : ordered) {
    md << "- **" << r->system << "**:";
    for (const auto& [point, loss] : r->grid_record) {
      md << ' ' << point << "=";
      if (std::isnan(loss)) {
        md << "failed";
      } else {
        md << format_fixed(loss, 6);
      }
    }
    md << '\n';
  }
  if (!md) throw IoError("short write to report: " + out_dir + "/report.md");
}

// ---- RunResult round trip ------------------------------------------------------------

namespace {

json condition_accuracy_to_json(const ConditionAccuracy& c) {
  return json{{"condition", c.condition},
              {"total", c.total},
              {"correct", c.correct},
              {"accuracy", c.accuracy}};
}

ConditionAccuracy condition_accuracy_from_json(const json& j) {
  return {j.at("condition").get<std::string>(), j.at("total").get<int>(),
          j.at("correct").get<int>(), j.at("accuracy").get<double>()};
}

}  // namespace

void save_run_result(const RunResult& result, const std::string& path) {
  json j;
  j["system"] = result.system;
  j["seed"] = result.seed;
  j["wall_time_s"] = result.wall_time_s;
  j["class_labels"] = result.class_labels;
  j["chosen_hyperparams"] = result.chosen_hyperparams;
  j["protocol_note"] = result.protocol_note;
  json metrics;
  metrics["total"] = result.metrics.total;
  metrics["correct"] = result.metrics.correct;
  metrics["accuracy"] = result.metrics.accuracy;
  metrics["macro_f1"] = result.metrics.macro_f1;
  metrics["per_snr"] = json::array();
  for (const ConditionAccuracy& c : result.metrics.per_snr) {
    metrics["per_snr"].push_back(condition_accuracy_to_json(c));
  }
  metrics["per_noise"] = json::array();
  for (const ConditionAccuracy& c : result.metrics.per_noise) {
    metrics["per_noise"].push_back(condition_accuracy_to_json(c));
  }
  json confusion = json::array();
  for (Eigen::Index r = 0; r < result.metrics.confusion.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < result.metrics.confusion.cols(); ++c) {
      row.push_back(result.metrics.confusion(r, c));
    }
    confusion.push_back(row);
  }
  metrics["confusion"] = confusion;
  j["metrics"] = metrics;
  json grid = json::array();
  for (const auto& [point, loss] : result.grid_record) {
    grid.push_back({{"point", point},
                    {"mean_val_loss", std::isnan(loss) ? json(nullptr) : json(loss)}});
  }
  j["grid_record"] = grid;
  json denoise = json::array();
  for (const DenoisingRow& d : result.denoising) {
    denoise.push_back(
        {{"snr", d.snr}, {"model_mse", d.model_mse}, {"identity_mse", d.identity_mse}});
  }
  j["denoising"] = denoise;

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open run result for writing: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("short write to run result: " + path);
}

RunResult load_run_result(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open run result: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& err) {
    throw DataError("run result malformed: " + path + ": " + err.what());
  }
  try {
    RunResult r;
    r.system = j.at("system").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.wall_time_s = j.at("wall_time_s").get<double>();
    r.class_labels = j.at("class_labels").get<std::vector<std::string>>();
    r.chosen_hyperparams =
        j.at("chosen_hyperparams").get<std::map<std::string, std::string>>();
    r.protocol_note = j.at("protocol_note").get<std::string>();
    const json& m = j.at("metrics");
    r.metrics.total = m.at("total").get<int>();
    r.metrics.correct = m.at("correct").get<int>();
    r.metrics.accuracy = m.at("accuracy").get<double>();
    r.metrics.macro_f1 = m.at("macro_f1").get<double>();
    for (const json& c : m.at("per_snr")) {
      r.metrics.per_snr.push_back(condition_accuracy_from_json(c));
    }
    for (const json& c : m.at("per_noise")) {
      r.metrics.per_noise.push_back(condition_accuracy_from_json(c));
    }
    const json& confusion = m.at("confusion");
    const Eigen::Index n = static_cast<Eigen::Index>(confusion.size());
    r.metrics.confusion.resize(n, n);
    for (Eigen::Index row = 0; row < n; ++row) {
      const json& jr = confusion.at(static_cast<std::size_t>(row));
      if (static_cast<Eigen::Index>(jr.size()) != n) {
        throw DataError("run result: ragged confusion matrix in " + path);
      }
      for (Eigen::Index col = 0; col < n; ++col) {
        r.metrics.confusion(row, col) = jr.at(static_cast<std::size_t>(col)).get<int>();
      }
    }
    for (const json& g : j.at("grid_record")) {
      const json& loss = g.at("mean_val_loss");
      r.grid_record.emplace_back(g.at("point").get<std::string>(),
                                 loss.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                : loss.get<double>());
    }
    for (const json& d : j.at("denoising")) {
      r.denoising.push_back({d.at("snr").get<std::string>(), d.at("model_mse").get<double>(),
                             d.at("identity_mse").get<double>()});
    }
    return r;
  } catch (const json::exception& err) {
    throw DataError("run result missing field: " + path + ": " + err.what());
  }
}

}  // namespace rdae
