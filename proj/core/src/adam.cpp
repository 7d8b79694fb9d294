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

#include "rdae/adam.hpp"

#include <cmath>

#include "rdae/error.hpp"

namespace rdae {

Optimizer::Optimizer(OptimizerKind kind, double beta1, double beta2, double eps)
    : kind_(kind), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void Optimizer::step(std::vector<ParamRef>& params, double learning_rate) {
  for (const ParamRef& p : params) {
    if (!p.grad->allFinite()) {
      throw NumericError("non-finite gradient for parameter '" + p.name + "'");
    }
  }

  if (kind_ == OptimizerKind::kSgd) {
    ++t_;
    for (ParamRef& p : params) *p.value -= learning_rate * *p.grad;
    return;
  }

  if (m_.empty()) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const ParamRef& p : params) {
      m_.push_back(Eigen::MatrixXd::Zero(p.value->rows(), p.value->cols()));
      v_.push_back(Eigen::MatrixXd::Zero(p.value->rows(), p.value->cols()));
    }
  }
  if (m_.size() != params.size()) {
    throw ArgumentError("Optimizer: parameter list size changed between steps");
  }

  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Eigen::MatrixXd& g = *params[i].grad;
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.cwiseProduct(g);
    const Eigen::ArrayXXd mhat = m_[i].array() / bc1;
    const Eigen::ArrayXXd vhat = v_[i].array() / bc2;
    params[i].value->array() -= learning_rate * mhat / (vhat.sqrt() + eps_);
  }
}

void Optimizer::reset() {
  t_ = 0;
  m_.clear();
  v_.clear();
}

}  // namespace rdae
