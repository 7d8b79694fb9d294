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

#ifndef RDAE_GRU_HPP_
#define RDAE_GRU_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rdae/rng.hpp"

namespace rdae {

// A batch sequence: T timestep matrices, each batch_size x dim.
using BatchSequence = std::vector<Eigen::MatrixXd>;

// Single GRU layer with update gate z, reset gate r and candidate h~:
//   z_t = sigmoid(W_z x_t + U_z h_{t-1} + b_z)
//   r_t = sigmoid(W_r x_t + U_r h_{t-1} + b_r)
//   h~_t = tanh(W_h x_t + U_h (r_t o h_{t-1}) + b_h)
//   h_t = (1 - z_t) o h_{t-1} + z_t o h~_t
// so z = 1 takes the candidate and z = 0 keeps the previous state.
class GruLayer {
 public:
  // Weights start uniform(-a, a), a = sqrt(6 / (fan_in + fan_out)); biases zero.
  GruLayer(int input_dim, int hidden_dim, const std::string& name, Rng& rng);
  // Uninitialized (zero) parameters; used when loading from a checkpoint.
  GruLayer(int input_dim, int hidden_dim, const std::string& name);

  int input_dim() const { return input_dim_; }
  int hidden_dim() const { return hidden_dim_; }
  const std::string& name() const { return name_; }

  struct Cache {
    BatchSequence x;      // inputs per timestep, B x input_dim
    BatchSequence z, r;   // gate activations, B x hidden_dim
    BatchSequence hcand;  // candidate states
    BatchSequence h;      // output states
    Eigen::MatrixXd h0;   // initial state, B x hidden_dim
  };

  // Runs the recurrence over x (T matrices of B x input_dim) from h0 = 0.
  // `cache`, when non-null, records activations for backward().
  BatchSequence forward(const BatchSequence& x, Cache* cache = nullptr) const;

  // Backpropagation through time. `dh` holds the loss gradient w.r.t. each
  // output h_t. Parameter gradients are ACCUMULATED into the grad buffers
  // (callers zero them between steps); returns gradients w.r.t. each x_t.
  BatchSequence backward(const Cache& cache, const BatchSequence& dh);

  // Parameter access in serialization order:
  // W_z, W_r, W_h, U_z, U_r, U_h, b_z, b_r, b_h.
  struct ParamRef {
    std::string name;
    Eigen::MatrixXd* value;
    Eigen::MatrixXd* grad;
  };
  std::vector<ParamRef> params();

  void zero_grads();

 private:
  int input_dim_;
  int hidden_dim_;
  std::string name_;
  // Weight matrices are hidden x input (W) and hidden x hidden (U); biases
  // are stored hidden x 1 so every parameter is a MatrixXd.
  Eigen::MatrixXd Wz_, Wr_, Wh_, Uz_, Ur_, Uh_, bz_, br_, bh_;
  Eigen::MatrixXd dWz_, dWr_, dWh_, dUz_, dUr_, dUh_, dbz_, dbr_, dbh_;
};

}  // namespace rdae

#endif  // RDAE_GRU_HPP_
