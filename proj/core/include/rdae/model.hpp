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

#ifndef RDAE_MODEL_HPP_
#define RDAE_MODEL_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rdae/gru.hpp"
#include "rdae/layers.hpp"
#include "rdae/rng.hpp"

namespace rdae {

// Common view over every trainable tensor of a model.
using ParamRef = GruLayer::ParamRef;

// Recurrent denoising autoencoder: GRU encoder reduces each timestep from
// input_dim to hidden_dim, the decoder maps the encoded sequence back, and a
// shared per-timestep linear readout produces the reconstruction. The
// embedding is the row-major flatten of the encoder output
// (num_timesteps x hidden_dim). Defaults give 27x140 -> 27x40 -> 1080.
// The transposed variant reuses this class with
// (num_timesteps=140, input_dim=27, hidden_dim=time_hidden).
struct RdaeOptions {
  int num_timesteps = 27;
  int input_dim = 140;
  int hidden_dim = 40;
  int encoder_depth = 1;
  int decoder_depth = 1;

  int embedding_dim() const { return num_timesteps * hidden_dim; }
};

class RdaeModel {
 public:
  RdaeModel(const RdaeOptions& opts, Rng& rng);
  explicit RdaeModel(const RdaeOptions& opts);  // zero parameters (checkpoint load)

  const RdaeOptions& options() const { return opts_; }

  struct Cache {
    std::vector<GruLayer::Cache> encoder;
    std::vector<GruLayer::Cache> decoder;
    std::vector<DenseLayer::Cache> readout;  // one per timestep
  };

  struct Forward {
    Eigen::MatrixXd embedding;  // B x embedding_dim, row-major flatten per sample
    BatchSequence recon;        // T matrices of B x input_dim
  };

  // x: T matrices of B x input_dim (normalized noisy spectrogram rows).
  Forward forward(const BatchSequence& x, Cache* cache = nullptr) const;

  // Embedding-only eval pass (iRDAE stage 2, evaluation).
  Eigen::MatrixXd embed(const BatchSequence& x) const;

  // Backward from gradients w.r.t. reconstruction timesteps and embedding.
  // Either may be empty/zero-sized to skip that path. Returns nothing; the
  // parameter grad buffers accumulate.
  void backward(const Cache& cache, const BatchSequence& drecon,
                const Eigen::MatrixXd& dembedding);

  std::vector<ParamRef> params();
  void zero_grads();

 private:
  RdaeOptions opts_;
  std::vector<GruLayer> encoder_;
  std::vector<GruLayer> decoder_;
  DenseLayer readout_;
};

// Two-layer softmax classifier over embeddings, with inverted dropout after
// the ReLU hidden layer and L2 on the two weight matrices (not biases).
struct SnnOptions {
  int input_dim = 1080;
  int hidden_units = 1000;
  int num_classes = 0;  // required
  double dropout_rate = 0.30;
  double l2_lambda = 0.01;
};

class SnnClassifier {
 public:
  SnnClassifier(const SnnOptions& opts, Rng& rng);
  explicit SnnClassifier(const SnnOptions& opts);

  const SnnOptions& options() const { return opts_; }

  struct Cache {
    DenseLayer::Cache d1;
    DenseLayer::Cache d2;
    Eigen::MatrixXd mask;  // empty in eval mode
  };

  // Returns B x num_classes probabilities. `rng` is consumed only when
  // training (dropout mask); pass nullptr in eval mode.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& embeddings, bool training, Rng* rng,
                          Cache* cache = nullptr) const;

  // dlogits: gradient w.r.t. pre-softmax logits. Returns d(embeddings).
  // Does NOT add the L2 term; call add_l2_grads() once per batch.
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& dlogits);

  double l2_penalty() const;  // l2_lambda * (|W1|^2 + |W2|^2)
  void add_l2_grads();        // dW += 2 * l2_lambda * W

  std::vector<ParamRef> params();
  void zero_grads();

 private:
  SnnOptions opts_;
  DenseLayer dense1_;
  DenseLayer dense2_;
};

// Joint assembly: loss = mean_batch[mse(recon, clean) + lambda * ce] + L2.
struct JointOptions {
  RdaeOptions rdae;
  SnnOptions snn;
  double lambda = 1.0;
};

class JointModel {
 public:
  JointModel(const JointOptions& opts, Rng& rng);
  explicit JointModel(const JointOptions& opts);

  const JointOptions& options() const { return opts_; }
  RdaeModel& rdae() { return rdae_; }
  const RdaeModel& rdae() const { return rdae_; }
  SnnClassifier& snn() { return snn_; }
  const SnnClassifier& snn() const { return snn_; }

  struct Cache {
    RdaeModel::Cache rdae;
    SnnClassifier::Cache snn;
    RdaeModel::Forward fwd;
    Eigen::MatrixXd probs;
  };

  struct LossBreakdown {
    double total = 0.0;  // recon + lambda*ce + l2
    double recon = 0.0;
    double ce = 0.0;
    double l2 = 0.0;
  };

  // noisy/clean: T matrices of B x input_dim; labels: B class indices.
  LossBreakdown forward_loss(const BatchSequence& noisy, const BatchSequence& clean,
                             const std::vector<int>& labels, bool training, Rng* rng,
                             Cache* cache = nullptr) const;

  // Full backward pass for the batch the cache was recorded on.
  void backward(const Cache& cache, const BatchSequence& clean,
                const std::vector<int>& labels);

  std::vector<ParamRef> params();
  void zero_grads();

 private:
  JointOptions opts_;
  RdaeModel rdae_;
  SnnClassifier snn_;
};

// Convenience single-sample wrappers used by tests and the evaluate path.
// x is one num_timesteps x input_dim matrix.
BatchSequence to_batch_sequence(const std::vector<const Eigen::MatrixXd*>& samples);
Eigen::VectorXd rdae_embed_single(const RdaeModel& model, const Eigen::MatrixXd& x);
Eigen::MatrixXd rdae_reconstruct_single(const RdaeModel& model, const Eigen::MatrixXd& x);

}  // namespace rdae

#endif  // RDAE_MODEL_HPP_
