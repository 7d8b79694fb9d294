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

#include "rdae/folds.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "rdae/error.hpp"
#include "rdae/rng.hpp"

namespace rdae {

FoldPlan make_fold_plan(const std::vector<GroupInfo>& groups, std::uint64_t seed) {
  if (groups.empty()) throw ArgumentError("make_fold_plan: no groups");

  // Deduplicate by group_key and verify speaker consistency.
  std::map<std::string, std::string> speaker_of;
  for (const GroupInfo& g : groups) {
    const auto [it, inserted] = speaker_of.emplace(g.group_key, g.speaker_id);
    if (!inserted && it->second != g.speaker_id) {
      throw DataError("make_fold_plan: group '" + g.group_key +
                      "' maps to speakers '" + it->second + "' and '" + g.speaker_id + "'");
    }
  }
  std::map<std::string, std::vector<std::string>> by_speaker;
  for (const auto& [key, spk] : speaker_of) by_speaker[spk].push_back(key);

  const std::size_t total = speaker_of.size();
  for (const auto& [spk, keys] : by_speaker) {
    if (keys.size() < 5) {
      throw DataError("make_fold_plan: speaker '" + spk + "' has only " +
                      std::to_string(keys.size()) + " groups; stratification needs >= 5");
    }
  }

  // Outer-test allocation: global target round(0.33 * total), split across
  // speakers by largest remainder of 0.33 * n_speaker.
  const auto target =
      static_cast<std::size_t>(std::floor(0.33 * static_cast<double>(total) + 0.5));
  struct Alloc {
    std::string speaker;
    std::size_t base;
    double frac;
  };
  std::vector<Alloc> allocs;
  std::size_t base_sum = 0;
  for (const auto& [spk, keys] : by_speaker) {
    const double quota = 0.33 * static_cast<double>(keys.size());
    const auto base = static_cast<std::size_t>(std::floor(quota));
    allocs.push_back({spk, base, quota - std::floor(quota)});
    base_sum += base;
  }
  std::vector<std::size_t> bump_order(allocs.size());
  for (std::size_t i = 0; i < allocs.size(); ++i) bump_order[i] = i;
  std::stable_sort(bump_order.begin(), bump_order.end(),
                   [&](std::size_t a, std::size_t b) { return allocs[a].frac > allocs[b].frac; });
  std::map<std::string, std::size_t> outer_take;
  for (const Alloc& a : allocs) outer_take[a.speaker] = a.base;
  for (std::size_t i = 0; i < bump_order.size() && base_sum + i < target; ++i) {
    ++outer_take[allocs[bump_order[i]].speaker];
  }

  FoldPlan plan;
  plan.seed = seed;
  Rng rng(stream_seed(seed, "fold_plan"));

  // by_speaker iterates sorted speakers; keys within each speaker are sorted
  // before the seeded shuffle, so the plan is a pure function of (input, seed).
  for (auto& [spk, keys] : by_speaker) {
    shuffle(keys, rng);
    const std::size_t take = outer_take[spk];
    for (std::size_t i = 0; i < take; ++i) plan.outer_test.push_back(keys[i]);

    const std::size_t rest = keys.size() - take;
    const std::size_t fold_base = rest / 3;
    const std::size_t fold_rem = rest % 3;
    std::size_t cursor = take;
    for (std::size_t f = 0; f < 3; ++f) {
      const std::size_t n = fold_base + (f < fold_rem ? 1 : 0);
      for (std::size_t i = 0; i < n; ++i) plan.inner[f].push_back(keys[cursor++]);
    }
  }

  std::sort(plan.outer_test.begin(), plan.outer_test.end());
  for (auto& fold : plan.inner) std::sort(fold.begin(), fold.end());
  return plan;
}

}  // namespace rdae
