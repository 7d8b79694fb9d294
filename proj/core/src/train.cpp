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

#include "rdae/train.hpp"

#include <numeric>

#include "rdae/error.hpp"

namespace rdae {

void TrainConfig::validate() const {
  if (epochs <= 0 || batch_size <= 0 || patience <= 0) {
    throw ArgumentError("TrainConfig: epochs, batch_size and patience must be positive");
  }
  if (learning_rate <= 0.0) {
    throw ArgumentError("TrainConfig: learning_rate must be positive");
  }
  if (loss_weight_lambda < 0.0) {
    throw ArgumentError("TrainConfig: loss_weight_lambda must be non-negative");
  }
  if (patience > epochs) {
    throw ArgumentError("TrainConfig: patience must not exceed epochs");
  }
}

TrainHistory train_loop(TrainDriver& driver, const TrainConfig& config) {
  config.validate();
  const std::size_t n = driver.train_size();
  if (n == 0) throw ArgumentError("train: empty training set");

  Rng shuffle_rng(stream_seed(config.seed, "train_shuffle"));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  TrainHistory history;
  int epochs_without_improvement = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle(order, shuffle_rng);
    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t count =
          std::min(static_cast<std::size_t>(config.batch_size), n - start);
      const std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                           order.begin() + static_cast<std::ptrdiff_t>(start + count));
      loss_sum += driver.train_batch(batch) * static_cast<double>(count);
      seen += count;
    }
    const double train_loss = loss_sum / static_cast<double>(seen);
    const double val_loss = driver.validation_loss();
    history.epochs.push_back({epoch, train_loss, val_loss});

    if (history.best_epoch == 0 || val_loss < history.best_val_loss) {
      history.best_epoch = epoch;
      history.best_val_loss = val_loss;
      driver.snapshot_best();
      epochs_without_improvement = 0;
    } else {
      ++epochs_without_improvement;
      if (epochs_without_improvement >= config.patience) {
        history.early_stopped = true;
        break;
      }
    }
  }

  driver.restore_best();
  return history;
}

std::vector<Eigen::MatrixXd> snapshot_params(std::vector<ParamRef> params) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(params.size());
  for (const ParamRef& p : params) out.push_back(*p.value);
  return out;
}

void restore_params(std::vector<ParamRef> params, const std::vector<Eigen::MatrixXd>& saved) {
  if (params.size() != saved.size()) {
    throw ArgumentError("restore_params: snapshot size mismatch");
  }
  for (std::size_t i = 0; i < params.size(); ++i) *params[i].value = saved[i];
}

void gather_joint_batch(const JointDataset& data, const std::vector<std::size_t>& indices,
                        BatchSequence* noisy, BatchSequence* clean,
                        std::vector<int>* labels) {
  if (indices.empty()) throw ArgumentError("gather_joint_batch: empty batch");
  const Eigen::Index T = data[indices[0]].noisy.rows();
  const Eigen::Index D = data[indices[0]].noisy.cols();
  noisy->assign(static_cast<std::size_t>(T), Eigen::MatrixXd());
  clean->assign(static_cast<std::size_t>(T), Eigen::MatrixXd());
  for (Eigen::Index t = 0; t < T; ++t) {
    (*noisy)[static_cast<std::size_t>(t)].resize(static_cast<Eigen::Index>(indices.size()), D);
    (*clean)[static_cast<std::size_t>(t)].resize(static_cast<Eigen::Index>(indices.size()), D);
  }
  labels->resize(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const JointSample& s = data[indices[i]];
    if (s.noisy.rows() != T || s.noisy.cols() != D || s.clean.rows() != T ||
        s.clean.cols() != D) {
      throw ArgumentError("gather_joint_batch: inconsistent sample shapes");
    }
    for (Eigen::Index t = 0; t < T; ++t) {
      (*noisy)[static_cast<std::size_t>(t)].row(static_cast<Eigen::Index>(i)) = s.noisy.row(t);
      (*clean)[static_cast<std::size_t>(t)].row(static_cast<Eigen::Index>(i)) = s.clean.row(t);
    }
    (*labels)[i] = s.label;
  }
}

namespace {

// Shared batched-evaluation walk: calls fn on [start, start+count) windows.
template <typename Fn>
double batched_mean(std::size_t n, int batch_size, Fn&& fn) {
  double sum = 0.0;
  for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(batch_size)) {
    const std::size_t count = std::min(static_cast<std::size_t>(batch_size), n - start);
    sum += fn(start, count) * static_cast<double>(count);
  }
  return sum / static_cast<double>(n);
}

std::vector<std::size_t> window_indices(std::size_t start, std::size_t count) {
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), start);
  return idx;
}

}  // namespace

JointTrainDriver::JointTrainDriver(JointModel& model, const JointDataset& train,
                                   const JointDataset& val, const TrainConfig& config)
    : model_(model),
      train_(train),
      val_(val),
      config_(config),
      optimizer_(config.optimizer),
      dropout_rng_(stream_seed(config.seed, "dropout")) {
  if (train.empty() || val.empty()) {
    throw ArgumentError("train: empty train or validation set");
  }
}

double JointTrainDriver::train_batch(const std::vector<std::size_t>& indices) {
  BatchSequence noisy, clean;
  std::vector<int> labels;
  gather_joint_batch(train_, indices, &noisy, &clean, &labels);
  model_.zero_grads();
  JointModel::Cache cache;
  const JointModel::LossBreakdown loss =
      model_.forward_loss(noisy, clean, labels, /*training=*/true, &dropout_rng_, &cache);
  model_.backward(cache, clean, labels);
  auto params = model_.params();
  optimizer_.step(params, config_.learning_rate);
  return loss.total;
}

double JointTrainDriver::validation_loss() {
  return batched_mean(val_.size(), config_.batch_size, [&](std::size_t start, std::size_t count) {
    BatchSequence noisy, clean;
    std::vector<int> labels;
    gather_joint_batch(val_, window_indices(start, count), &noisy, &clean, &labels);
    return model_.forward_loss(noisy, clean, labels, /*training=*/false, nullptr).total;
  });
}

void JointTrainDriver::snapshot_best() { best_ = snapshot_params(model_.params()); }

void JointTrainDriver::restore_best() {
  if (!best_.empty()) restore_params(model_.params(), best_);
}

RdaeTrainDriver::RdaeTrainDriver(RdaeModel& model, const JointDataset& train,
                                 const JointDataset& val, const TrainConfig& config)
    : model_(model),
      train_(train),
      val_(val),
      config_(config),
      optimizer_(config.optimizer) {
  if (train.empty() || val.empty()) {
    throw ArgumentError("train: empty train or validation set");
  }
}

double RdaeTrainDriver::train_batch(const std::vector<std::size_t>& indices) {
  BatchSequence noisy, clean;
  std::vector<int> labels;
  gather_joint_batch(train_, indices, &noisy, &clean, &labels);
  model_.zero_grads();
  RdaeModel::Cache cache;
  const RdaeModel::Forward fwd = model_.forward(noisy, &cache);

  double sq = 0.0;
  std::size_t entries = 0;
  BatchSequence drecon(clean.size());
  for (std::size_t t = 0; t < clean.size(); ++t) {
    sq += (fwd.recon[t] - clean[t]).squaredNorm();
    entries += static_cast<std::size_t>(clean[t].size());
  }
  const double loss = sq / static_cast<double>(entries);
  for (std::size_t t = 0; t < clean.size(); ++t) {
    drecon[t] = 2.0 * (fwd.recon[t] - clean[t]) / static_cast<double>(entries);
  }
  model_.backward(cache, drecon, Eigen::MatrixXd());
  auto params = model_.params();
  optimizer_.step(params, config_.learning_rate);
  return loss;
}

double RdaeTrainDriver::validation_loss() {
  return batched_mean(val_.size(), config_.batch_size, [&](std::size_t start, std::size_t count) {
    BatchSequence noisy, clean;
    std::vector<int> labels;
    gather_joint_batch(val_, window_indices(start, count), &noisy, &clean, &labels);
    const RdaeModel::Forward fwd = model_.forward(noisy);
    double sq = 0.0;
    std::size_t entries = 0;
    for (std::size_t t = 0; t < clean.size(); ++t) {
      sq += (fwd.recon[t] - clean[t]).squaredNorm();
      entries += static_cast<std::size_t>(clean[t].size());
    }
    return sq / static_cast<double>(entries);
  });
}

void RdaeTrainDriver::snapshot_best() { best_ = snapshot_params(model_.params()); }

void RdaeTrainDriver::restore_best() {
  if (!best_.empty()) restore_params(model_.params(), best_);
}

SnnTrainDriver::SnnTrainDriver(SnnClassifier& model, const EmbeddingDataset& train,
                               const EmbeddingDataset& val, const TrainConfig& config)
    : model_(model),
      train_(train),
      val_(val),
      config_(config),
      optimizer_(config.optimizer),
      dropout_rng_(stream_seed(config.seed, "dropout")) {
  if (train.x.rows() == 0 || val.x.rows() == 0) {
    throw ArgumentError("train: empty train or validation set");
  }
  if (static_cast<std::size_t>(train.x.rows()) != train.labels.size() ||
      static_cast<std::size_t>(val.x.rows()) != val.labels.size()) {
    throw ArgumentError("train: embedding/label count mismatch");
  }
}

double SnnTrainDriver::train_batch(const std::vector<std::size_t>& indices) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(indices.size()), train_.x.cols());
  std::vector<int> labels(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = train_.x.row(static_cast<Eigen::Index>(indices[i]));
    labels[i] = train_.labels[indices[i]];
  }
  model_.zero_grads();
  SnnClassifier::Cache cache;
  const Eigen::MatrixXd probs =
      model_.forward(x, /*training=*/true, &dropout_rng_, &cache);
  const double loss = cross_entropy(probs, labels) + model_.l2_penalty();
  model_.backward(cache, cross_entropy_logit_grad(probs, labels));
  model_.add_l2_grads();
  auto params = model_.params();
  optimizer_.step(params, config_.learning_rate);
  return loss;
}

double SnnTrainDriver::validation_loss() {
  const std::size_t n = static_cast<std::size_t>(val_.x.rows());
  return batched_mean(n, config_.batch_size, [&](std::size_t start, std::size_t count) {
    const Eigen::MatrixXd x =
        val_.x.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(count));
    const std::vector<int> labels(val_.labels.begin() + static_cast<std::ptrdiff_t>(start),
                                  val_.labels.begin() + static_cast<std::ptrdiff_t>(start + count));
    const Eigen::MatrixXd probs = model_.forward(x, /*training=*/false, nullptr);
    return cross_entropy(probs, labels) + model_.l2_penalty();
  });
}

void SnnTrainDriver::snapshot_best() { best_ = snapshot_params(model_.params()); }

void SnnTrainDriver::restore_best() {
  if (!best_.empty()) restore_params(model_.params(), best_);
}

}  // namespace rdae
