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

#include "rdae/gru.hpp"

#include <cmath>

#include "rdae/error.hpp"
#include "rdae/layers.hpp"

namespace rdae {
namespace {

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& a) {
  return 1.0 / (1.0 + (-a.array()).exp());
}

}  // namespace

GruLayer::GruLayer(int input_dim, int hidden_dim, const std::string& name)
    : input_dim_(input_dim), hidden_dim_(hidden_dim), name_(name) {
  if (input_dim <= 0 || hidden_dim <= 0) {
    throw ArgumentError("GruLayer '" + name + "': dims must be positive");
  }
  Wz_ = Wr_ = Wh_ = Eigen::MatrixXd::Zero(hidden_dim, input_dim);
  Uz_ = Ur_ = Uh_ = Eigen::MatrixXd::Zero(hidden_dim, hidden_dim);
  bz_ = br_ = bh_ = Eigen::MatrixXd::Zero(hidden_dim, 1);
  zero_grads();
}

GruLayer::GruLayer(int input_dim, int hidden_dim, const std::string& name, Rng& rng)
    : GruLayer(input_dim, hidden_dim, name) {
  init_uniform_glorot(&Wz_, rng);
  init_uniform_glorot(&Wr_, rng);
  init_uniform_glorot(&Wh_, rng);
  init_uniform_glorot(&Uz_, rng);
  init_uniform_glorot(&Ur_, rng);
  init_uniform_glorot(&Uh_, rng);
}

BatchSequence GruLayer::forward(const BatchSequence& x, Cache* cache) const {
  if (x.empty()) throw ArgumentError("GruLayer '" + name_ + "': empty input sequence");
  for (const Eigen::MatrixXd& p : {Wz_, Wr_, Wh_, Uz_, Ur_, Uh_, bz_, br_, bh_}) {
    if (!p.allFinite()) {
      throw NumericError("GruLayer '" + name_ + "': non-finite parameter");
    }
  }
  const Eigen::Index batch = x.front().rows();
  const std::size_t T = x.size();

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(batch, hidden_dim_);
  if (cache) {
    cache->x = x;
    cache->z.resize(T);
    cache->r.resize(T);
    cache->hcand.resize(T);
    cache->h.resize(T);
    cache->h0 = h;
  }

  BatchSequence out(T);
  for (std::size_t t = 0; t < T; ++t) {
    const Eigen::MatrixXd& xt = x[t];
    if (xt.cols() != input_dim_ || xt.rows() != batch) {
      throw ArgumentError("GruLayer '" + name_ + "': timestep " + std::to_string(t) +
                          " is " + std::to_string(xt.rows()) + "x" +
                          std::to_string(xt.cols()) + ", expected " +
                          std::to_string(batch) + "x" + std::to_string(input_dim_));
    }
    const Eigen::MatrixXd z =
        sigmoid((xt * Wz_.transpose() + h * Uz_.transpose()).rowwise() +
                bz_.col(0).transpose());
    const Eigen::MatrixXd r =
        sigmoid((xt * Wr_.transpose() + h * Ur_.transpose()).rowwise() +
                br_.col(0).transpose());
    const Eigen::MatrixXd rh = r.cwiseProduct(h);
    const Eigen::MatrixXd hcand =
        ((xt * Wh_.transpose() + rh * Uh_.transpose()).rowwise() +
         bh_.col(0).transpose())
            .array()
            .tanh();
    const Eigen::MatrixXd hnew =
        (1.0 - z.array()) * h.array() + z.array() * hcand.array();
    if (cache) {
      cache->z[t] = z;
      cache->r[t] = r;
      cache->hcand[t] = hcand;
      cache->h[t] = hnew;
    }
    out[t] = hnew;
    h = hnew;
  }
  return out;
}

BatchSequence GruLayer::backward(const Cache& cache, const BatchSequence& dh) {
  const std::size_t T = cache.x.size();
  if (dh.size() != T) {
    throw ArgumentError("GruLayer '" + name_ + "': dh length " +
                        std::to_string(dh.size()) + " != sequence length " +
                        std::to_string(T));
  }
  const Eigen::Index batch = cache.x.front().rows();
  BatchSequence dx(T);
  Eigen::MatrixXd dnext = Eigen::MatrixXd::Zero(batch, hidden_dim_);

  for (std::size_t ti = T; ti-- > 0;) {
    const Eigen::MatrixXd& hprev = ti == 0 ? cache.h0 : cache.h[ti - 1];
    const Eigen::MatrixXd& z = cache.z[ti];
    const Eigen::MatrixXd& r = cache.r[ti];
    const Eigen::MatrixXd& hc = cache.hcand[ti];
    const Eigen::MatrixXd g = dh[ti] + dnext;

    // h_t = (1-z) o h_prev + z o h~
    const Eigen::MatrixXd daz =
        (g.array() * (hc - hprev).array() * z.array() * (1.0 - z.array())).matrix();
    const Eigen::MatrixXd dah =
        (g.array() * z.array() * (1.0 - hc.array().square())).matrix();
    Eigen::MatrixXd dhprev = (g.array() * (1.0 - z.array())).matrix();

    // Candidate branch: a_h = W_h x + U_h (r o h_prev) + b_h.
    const Eigen::MatrixXd drh = dah * Uh_;
    const Eigen::MatrixXd dar =
        (drh.array() * hprev.array() * r.array() * (1.0 - r.array())).matrix();
    dhprev.array() += drh.array() * r.array();

    dWh_ += dah.transpose() * cache.x[ti];
    dUh_ += dah.transpose() * r.cwiseProduct(hprev);
    dbh_.col(0) += dah.colwise().sum().transpose();

    dWr_ += dar.transpose() * cache.x[ti];
    dUr_ += dar.transpose() * hprev;
    dbr_.col(0) += dar.colwise().sum().transpose();
    dhprev += dar * Ur_;

    dWz_ += daz.transpose() * cache.x[ti];
    dUz_ += daz.transpose() * hprev;
    dbz_.col(0) += daz.colwise().sum().transpose();
    dhprev += daz * Uz_;

    dx[ti] = dah * Wh_ + dar * Wr_ + daz * Wz_;
    dnext = std::move(dhprev);
  }
  return dx;
}

std::vector<GruLayer::ParamRef> GruLayer::params() {
  return {
      {name_ + ".W_z", &Wz_, &dWz_}, {name_ + ".W_r", &Wr_, &dWr_},
      {name_ + ".W_h", &Wh_, &dWh_}, {name_ + ".U_z", &Uz_, &dUz_},
      {name_ + ".U_r", &Ur_, &dUr_}, {name_ + ".U_h", &Uh_, &dUh_},
      {name_ + ".b_z", &bz_, &dbz_}, {name_ + ".b_r", &br_, &dbr_},
      {name_ + ".b_h", &bh_, &dbh_},
  };
}

void GruLayer::zero_grads() {
  dWz_ = dWr_ = dWh_ = Eigen::MatrixXd::Zero(hidden_dim_, input_dim_);
  dUz_ = dUr_ = dUh_ = Eigen::MatrixXd::Zero(hidden_dim_, hidden_dim_);
  dbz_ = dbr_ = dbh_ = Eigen::MatrixXd::Zero(hidden_dim_, 1);
}

}  // namespace rdae
