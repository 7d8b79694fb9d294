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

#ifndef RDAE_LAYERS_HPP_
#define RDAE_LAYERS_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rdae/rng.hpp"

namespace rdae {

// Fills a weight matrix with uniform(-a, a), a = sqrt(6 / (fan_in + fan_out)),
// consuming one RNG draw per entry in column-major storage order.
void init_uniform_glorot(Eigen::MatrixXd* w, Rng& rng);

enum class Activation { kLinear, kRelu };

// Fully connected layer y = act(x W^T + b) over row-major batches (B x in).
class DenseLayer {
 public:
  DenseLayer(int input_dim, int output_dim, Activation act, const std::string& name,
             Rng& rng);
  DenseLayer(int input_dim, int output_dim, Activation act, const std::string& name);

  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }
  const std::string& name() const { return name_; }
  const Eigen::MatrixXd& weight() const { return W_; }

  struct Cache {
    Eigen::MatrixXd x;    // B x in
    Eigen::MatrixXd pre;  // B x out, pre-activation (cached only for ReLU)
  };

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache* cache = nullptr) const;

  // Accumulates dW/db and returns dx. `dy` is the gradient w.r.t. the output.
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& dy);

  struct ParamRef {
    std::string name;
    Eigen::MatrixXd* value;
    Eigen::MatrixXd* grad;
  };
  std::vector<ParamRef> params();
  void zero_grads();

 private:
  int input_dim_;
  int output_dim_;
  Activation act_;
  std::string name_;
  Eigen::MatrixXd W_;   // out x in
  Eigen::MatrixXd b_;   // out x 1
  Eigen::MatrixXd dW_, db_;
};

// Inverted dropout: in training mode each entry survives with probability
// 1-rate and is scaled by 1/(1-rate); eval mode is the identity. The mask is
// returned so backward can reuse it.
Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng);

// Row-wise stabilized softmax (log-sum-exp shift).
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);

// Mean cross-entropy of softmax probabilities against integer labels.
double cross_entropy(const Eigen::MatrixXd& probs, const std::vector<int>& labels);

// Gradient of mean cross-entropy w.r.t. the LOGITS: (probs - onehot) / B.
Eigen::MatrixXd cross_entropy_logit_grad(const Eigen::MatrixXd& probs,
                                         const std::vector<int>& labels);

// Mean squared error over all entries, and its gradient w.r.t. `recon`.
double mse(const Eigen::MatrixXd& recon, const Eigen::MatrixXd& target);
Eigen::MatrixXd mse_grad(const Eigen::MatrixXd& recon, const Eigen::MatrixXd& target);

}  // namespace rdae

#endif  // RDAE_LAYERS_HPP_
