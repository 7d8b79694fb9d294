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

#ifndef RDAE_FOLDS_HPP_
#define RDAE_FOLDS_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace rdae {

// Group-level split: 33% of group_keys held out for the outer test, the
// remaining 67% partitioned into 3 near-equal inner folds. Buckets hold
// group_keys, so every conditioned version of a segment lands in the same
// bucket by construction.
struct FoldPlan {
  std::vector<std::string> outer_test;              // sorted group_keys
  std::array<std::vector<std::string>, 3> inner;    // sorted group_keys each
  std::uint64_t seed = 0;
};

// (group_key, speaker_id) pairs; one per group, speaker consistent per group.
struct GroupInfo {
  std::string group_key;
  std::string speaker_id;
};

// Stratified by speaker: the outer test takes round(0.33 * total) groups,
// allocated per speaker by largest remainder so each speaker's share is
// within one group of 0.33 * n_speaker; inner folds split each speaker's
// remainder near-equally with leftovers going to the lowest-indexed folds.
// Deterministic given seed. Throws DataError naming any speaker with fewer
// than 5 groups (too small to stratify).
FoldPlan make_fold_plan(const std::vector<GroupInfo>& groups, std::uint64_t seed);

}  // namespace rdae

#endif  // RDAE_FOLDS_HPP_
