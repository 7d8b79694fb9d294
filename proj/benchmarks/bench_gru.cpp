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

#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "rdae/gru.hpp"
#include "rdae/model.hpp"
#include "rdae/rng.hpp"

namespace {

// Default model geometry: 27 timesteps of 140 mel bands into 40 hidden units.
constexpr int kTimesteps = 27;
constexpr int kInputDim = 140;
constexpr int kHiddenDim = 40;

rdae::BatchSequence random_sequence(int timesteps, int batch, int dim, rdae::Rng& rng) {
  rdae::BatchSequence x(static_cast<std::size_t>(timesteps));
  for (Eigen::MatrixXd& step : x) {
    step.resize(batch, dim);
    for (Eigen::Index j = 0; j < step.size(); ++j) step(j) = rdae::normal(rng);
  }
  return x;
}

void BM_GruForward(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  rdae::Rng rng(1);
  rdae::GruLayer gru(kInputDim, kHiddenDim, "encoder", rng);
  const rdae::BatchSequence x = random_sequence(kTimesteps, batch, kInputDim, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gru.forward(x));
  }
  state.SetItemsProcessed(state.iterations() * batch * kTimesteps);
}
BENCHMARK(BM_GruForward)->Arg(1)->Arg(32)->Arg(128);

void BM_GruForwardBackward(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  rdae::Rng rng(1);
  rdae::GruLayer gru(kInputDim, kHiddenDim, "encoder", rng);
  const rdae::BatchSequence x = random_sequence(kTimesteps, batch, kInputDim, rng);
  const rdae::BatchSequence dh = random_sequence(kTimesteps, batch, kHiddenDim, rng);
  for (auto _ : state) {
    gru.zero_grads();
    rdae::GruLayer::Cache cache;
    benchmark::DoNotOptimize(gru.forward(x, &cache));
    benchmark::DoNotOptimize(gru.backward(cache, dh));
  }
  state.SetItemsProcessed(state.iterations() * batch * kTimesteps);
}
BENCHMARK(BM_GruForwardBackward)->Arg(1)->Arg(32)->Arg(128);

// The full joint training step: forward loss, backward, no optimizer.
void BM_JointStep(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  rdae::JointOptions opts;
  opts.snn.num_classes = 5;
  rdae::Rng rng(1);
  rdae::JointModel model(opts, rng);
  const rdae::BatchSequence noisy = random_sequence(kTimesteps, batch, kInputDim, rng);
  const rdae::BatchSequence clean = random_sequence(kTimesteps, batch, kInputDim, rng);
  std::vector<int> labels(static_cast<std::size_t>(batch));
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 5);
  rdae::Rng dropout(2);
  for (auto _ : state) {
    model.zero_grads();
    rdae::JointModel::Cache cache;
    benchmark::DoNotOptimize(
        model.forward_loss(noisy, clean, labels, true, &dropout, &cache));
    model.backward(cache, clean, labels);
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_JointStep)->Arg(32)->Arg(128);

}  // namespace
