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

#ifndef RDAE_CHECKPOINT_HPP_
#define RDAE_CHECKPOINT_HPP_

#include <Eigen/Dense>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rdae/features.hpp"
#include "rdae/model.hpp"
#include "rdae/train.hpp"

namespace rdae {

// Checkpoint file layout:
//   u64 LE        header byte length
//   JSON          header (the CheckpointHeader fields; "version" mandatory)
//   tensors       concatenated, each row-major little-endian f64, in the
//                 exact order listed by header.tensors
struct TensorSpec {
  std::string name;
  int rows = 0;
  int cols = 0;
};

struct CheckpointHeader {
  int version = 1;
  std::string system;  // jrdae | irdae | trdae | handcrafted
  std::string kind;    // joint | rdae | snn  (which tensors are present)

  bool has_rdae = false;
  RdaeOptions rdae;
  bool has_snn = false;
  SnnOptions snn;
  double lambda = 1.0;

  TrainConfig train_config;
  int best_epoch = 0;
  double best_val_loss = 0.0;

  NormStats norm;                        // input normalization for this model
  std::vector<std::string> class_labels; // class index -> speaker id
  std::vector<std::string> outer_test_groups;  // held-out group_keys
  std::map<std::string, std::string> hyperparams;  // chosen grid point

  std::vector<TensorSpec> tensors;  // filled by save_checkpoint
};

struct Checkpoint {
  CheckpointHeader header;
  std::vector<std::pair<std::string, Eigen::MatrixXd>> tensors;  // file order

  const Eigen::MatrixXd& tensor(const std::string& name) const;
};

// Writes header + the given parameters (in their listed order). The header's
// `tensors` list is replaced to match `params`.
void save_checkpoint(const std::string& path, CheckpointHeader header,
                     std::vector<ParamRef> params);

Checkpoint load_checkpoint(const std::string& path);

// Copies checkpoint tensors into `params`, matching by name with shape
// checks; throws DataError when a parameter is missing or mis-shaped.
void load_params(const Checkpoint& ckpt, std::vector<ParamRef> params);

// Model rebuilders: construct the architecture from the header and load the
// tensors. Each throws DataError when the checkpoint lacks that component.
RdaeModel rebuild_rdae(const Checkpoint& ckpt);
SnnClassifier rebuild_snn(const Checkpoint& ckpt);
JointModel rebuild_joint(const Checkpoint& ckpt);

}  // namespace rdae

#endif  // RDAE_CHECKPOINT_HPP_
