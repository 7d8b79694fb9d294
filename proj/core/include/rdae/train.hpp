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

#ifndef RDAE_TRAIN_HPP_
#define RDAE_TRAIN_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "rdae/adam.hpp"
#include "rdae/model.hpp"
#include "rdae/rng.hpp"

namespace rdae {

struct TrainConfig {
  int epochs = 15;
  int batch_size = 128;
  double learning_rate = 0.001;
  int patience = 5;
  double loss_weight_lambda = 1.0;
  std::uint64_t seed = 0;
  OptimizerKind optimizer = OptimizerKind::kAdam;

  void validate() const;  // all positive; patience <= epochs
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_val_loss = 0.0;
  bool early_stopped = false;
};

// The epoch/patience protocol, separated from any concrete model so the
// stopping arithmetic is testable against scripted loss sequences: shuffle
// per epoch with a seeded RNG, train in batches, compute validation loss in
// eval mode, stop after `patience` consecutive epochs without strict
// improvement, and finish on the snapshot with minimum validation loss.
class TrainDriver {
 public:
  virtual ~TrainDriver() = default;
  virtual std::size_t train_size() const = 0;
  // Forward + backward + optimizer step on the given sample indices;
  // returns the batch training loss.
  virtual double train_batch(const std::vector<std::size_t>& indices) = 0;
  virtual double validation_loss() = 0;
  virtual void snapshot_best() = 0;
  virtual void restore_best() = 0;
};

TrainHistory train_loop(TrainDriver& driver, const TrainConfig& config);

// ---- Concrete datasets -----------------------------------------------------

struct JointSample {
  Eigen::MatrixXd noisy;  // T x input_dim, normalized
  Eigen::MatrixXd clean;  // T x input_dim, normalized clean target
  int label = 0;
};
using JointDataset = std::vector<JointSample>;

struct EmbeddingDataset {
  Eigen::MatrixXd x;        // N x dim
  std::vector<int> labels;  // N
};

// ---- Concrete drivers --------------------------------------------------------

// Joint objective: mean[mse + lambda*ce] + L2, with lambda taken from the
// model's construction-time options (callers build the model from the same
// config they train with).
class JointTrainDriver : public TrainDriver {
 public:
  JointTrainDriver(JointModel& model, const JointDataset& train, const JointDataset& val,
                   const TrainConfig& config);

  std::size_t train_size() const override { return train_.size(); }
  double train_batch(const std::vector<std::size_t>& indices) override;
  double validation_loss() override;
  void snapshot_best() override;
  void restore_best() override;

 private:
  JointModel& model_;
  const JointDataset& train_;
  const JointDataset& val_;
  TrainConfig config_;
  Optimizer optimizer_;
  Rng dropout_rng_;
  std::vector<Eigen::MatrixXd> best_;
};

// Reconstruction-only objective (the lambda = 0 limit): trains the RDAE
// alone on MSE against clean targets; labels are ignored.
class RdaeTrainDriver : public TrainDriver {
 public:
  RdaeTrainDriver(RdaeModel& model, const JointDataset& train, const JointDataset& val,
                  const TrainConfig& config);

  std::size_t train_size() const override { return train_.size(); }
  double train_batch(const std::vector<std::size_t>& indices) override;
  double validation_loss() override;
  void snapshot_best() override;
  void restore_best() override;

 private:
  RdaeModel& model_;
  const JointDataset& train_;
  const JointDataset& val_;
  TrainConfig config_;
  Optimizer optimizer_;
  std::vector<Eigen::MatrixXd> best_;
};

// Classifier-only objective: CE + L2 on fixed embedding (or handcrafted)
// vectors.
class SnnTrainDriver : public TrainDriver {
 public:
  SnnTrainDriver(SnnClassifier& model, const EmbeddingDataset& train,
                 const EmbeddingDataset& val, const TrainConfig& config);

  std::size_t train_size() const override {
    return static_cast<std::size_t>(train_.x.rows());
  }
  double train_batch(const std::vector<std::size_t>& indices) override;
  double validation_loss() override;
  void snapshot_best() override;
  void restore_best() override;

 private:
  SnnClassifier& model_;
  const EmbeddingDataset& train_;
  const EmbeddingDataset& val_;
  TrainConfig config_;
  Optimizer optimizer_;
  Rng dropout_rng_;
  std::vector<Eigen::MatrixXd> best_;
};

// Snapshot helpers shared by the drivers (copy by value in params() order).
std::vector<Eigen::MatrixXd> snapshot_params(std::vector<ParamRef> params);
void restore_params(std::vector<ParamRef> params, const std::vector<Eigen::MatrixXd>& saved);

// Assembles batch matrices from dataset indices.
void gather_joint_batch(const JointDataset& data, const std::vector<std::size_t>& indices,
                        BatchSequence* noisy, BatchSequence* clean,
                        std::vector<int>* labels);

}  // namespace rdae

#endif  // RDAE_TRAIN_HPP_
