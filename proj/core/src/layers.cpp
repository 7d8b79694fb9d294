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

#include "rdae/layers.hpp"

#include <cmath>

#include "rdae/error.hpp"

namespace rdae {

void init_uniform_glorot(Eigen::MatrixXd* w, Rng& rng) {
  const double fan_in = static_cast<double>(w->cols());
  const double fan_out = static_cast<double>(w->rows());
  const double a = std::sqrt(6.0 / (fan_in + fan_out));
  for (Eigen::Index c = 0; c < w->cols(); ++c) {
    for (Eigen::Index r = 0; r < w->rows(); ++r) {
      (*w)(r, c) = (2.0 * uniform_real(rng) - 1.0) * a;
    }
  }
}

DenseLayer::DenseLayer(int input_dim, int output_dim, Activation act,
                       const std::string& name)
    : input_dim_(input_dim), output_dim_(output_dim), act_(act), name_(name) {
  if (input_dim <= 0 || output_dim <= 0) {
    throw ArgumentError("DenseLayer '" + name + "': dims must be positive");
  }
  W_ = Eigen::MatrixXd::Zero(output_dim, input_dim);
  b_ = Eigen::MatrixXd::Zero(output_dim, 1);
  zero_grads();
}

DenseLayer::DenseLayer(int input_dim, int output_dim, Activation act,
                       const std::string& name, Rng& rng)
    : DenseLayer(input_dim, output_dim, act, name) {
  init_uniform_glorot(&W_, rng);
}

Eigen::MatrixXd DenseLayer::forward(const Eigen::MatrixXd& x, Cache* cache) const {
  if (x.cols() != input_dim_) {
    throw ArgumentError("DenseLayer '" + name_ + "': input has " +
                        std::to_string(x.cols()) + " columns, expected " +
                        std::to_string(input_dim_));
  }
  if (!W_.allFinite() || !b_.allFinite()) {
    throw NumericError("DenseLayer '" + name_ + "': non-finite parameter");
  }
  Eigen::MatrixXd pre = (x * W_.transpose()).rowwise() + b_.col(0).transpose();
  if (cache) cache->x = x;
  if (act_ == Activation::kRelu) {
    if (cache) cache->pre = pre;
    return pre.cwiseMax(0.0);
  }
  return pre;
}

Eigen::MatrixXd DenseLayer::backward(const Cache& cache, const Eigen::MatrixXd& dy) {
  Eigen::MatrixXd dpre = dy;
  if (act_ == Activation::kRelu) {
    dpre = (cache.pre.array() > 0.0).cast<double>() * dy.array();
  }
  dW_ += dpre.transpose() * cache.x;
  db_.col(0) += dpre.colwise().sum().transpose();
  return dpre * W_;
}

std::vector<DenseLayer::ParamRef> DenseLayer::params() {
  return {{name_ + ".W", &W_, &dW_}, {name_ + ".b", &b_, &db_}};
}

void DenseLayer::zero_grads() {
  dW_ = Eigen::MatrixXd::Zero(output_dim_, input_dim_);
  db_ = Eigen::MatrixXd::Zero(output_dim_, 1);
}

Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate,
                             Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw ArgumentError("dropout rate must be in [0, 1): " + std::to_string(rate));
  }
  const double keep = 1.0 - rate;
  Eigen::MatrixXd mask(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      mask(r, c) = uniform_real(rng) < keep ? 1.0 / keep : 0.0;
    }
  }
  return mask;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    Eigen::ArrayXd e = (logits.row(i).array() - mx).exp();
    out.row(i) = (e / e.sum()).matrix();
  }
  return out;
}

double cross_entropy(const Eigen::MatrixXd& probs, const std::vector<int>& labels) {
  if (static_cast<std::size_t>(probs.rows()) != labels.size()) {
    throw ArgumentError("cross_entropy: batch size mismatch");
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= probs.cols()) {
      throw ArgumentError("cross_entropy: label " + std::to_string(y) +
                          " out of range for " + std::to_string(probs.cols()) +
                          " classes");
    }
    acc -= std::log(probs(i, y) + 1e-300);  // guard exact zeros from saturation
  }
  return acc / static_cast<double>(probs.rows());
}

Eigen::MatrixXd cross_entropy_logit_grad(const Eigen::MatrixXd& probs,
                                         const std::vector<int>& labels) {
  if (static_cast<std::size_t>(probs.rows()) != labels.size()) {
    throw ArgumentError("cross_entropy_logit_grad: batch size mismatch");
  }
  Eigen::MatrixXd g = probs;
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    g(i, labels[static_cast<std::size_t>(i)]) -= 1.0;
  }
  return g / static_cast<double>(probs.rows());
}

double mse(const Eigen::MatrixXd& recon, const Eigen::MatrixXd& target) {
  if (recon.rows() != target.rows() || recon.cols() != target.cols()) {
    throw ArgumentError("mse: shape mismatch " + std::to_string(recon.rows()) + "x" +
                        std::to_string(recon.cols()) + " vs " +
                        std::to_string(target.rows()) + "x" +
                        std::to_string(target.cols()));
  }
  return (recon - target).squaredNorm() / static_cast<double>(recon.size());
}

Eigen::MatrixXd mse_grad(const Eigen::MatrixXd& recon, const Eigen::MatrixXd& target) {
  if (recon.rows() != target.rows() || recon.cols() != target.cols()) {
    throw ArgumentError("mse_grad: shape mismatch");
  }
  return 2.0 * (recon - target) / static_cast<double>(recon.size());
}

}  // namespace rdae
