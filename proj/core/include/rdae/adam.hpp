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

#ifndef RDAE_ADAM_HPP_
#define RDAE_ADAM_HPP_

#include <Eigen/Dense>
#include <vector>

#include "rdae/model.hpp"

namespace rdae {

enum class OptimizerKind { kAdam, kSgd };

// Adam with bias correction (beta1 = 0.9, beta2 = 0.999, eps = 1e-8), or
// plain SGD when configured. Moment buffers are allocated on first use and
// keyed by parameter position, so the params() order must stay stable.
class Optimizer {
 public:
  explicit Optimizer(OptimizerKind kind = OptimizerKind::kAdam, double beta1 = 0.9,
                     double beta2 = 0.999, double eps = 1e-8);

  // Applies one update to every parameter from its accumulated gradient.
  // Throws NumericError naming the parameter on a non-finite gradient.
  void step(std::vector<ParamRef>& params, double learning_rate);

  // Drops all moment state (fresh optimizer for a new training run).
  void reset();

  long step_count() const { return t_; }

 private:
  OptimizerKind kind_;
  double beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Eigen::MatrixXd> m_;
  std::vector<Eigen::MatrixXd> v_;
};

}  // namespace rdae

#endif  // RDAE_ADAM_HPP_
