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

#ifndef RDAE_CONFIG_HPP_
#define RDAE_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rdae {

// Flat key-value text config:
//   # comment
//   epochs = 15
//   grid.loss_weight_lambda = 0.5, 1.0, 2.0
//
// Keys are bare words (dots allowed for grouping, e.g. grid.*); values are
// everything after the first '='. Duplicate keys are an error — CLI flags,
// not repetition, are the override mechanism.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_string(const std::string& text,
                                     const std::string& origin = "<string>");

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::vector<std::string> keys() const;

  // Typed accessors throw DataError naming the key on a malformed value and
  // ArgumentError when a required key is missing.
  std::string get_string(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  double get_real(const std::string& key) const;
  std::string get_string_or(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const;
  double get_real_or(const std::string& key, double fallback) const;

  // Comma-separated list of numbers.
  std::vector<double> get_real_list(const std::string& key) const;

  // Overwrites (or inserts) a value; used for CLI-flag overrides.
  void set(const std::string& key, const std::string& value);

 private:
  std::map<std::string, std::string> values_;  // ordered for stable iteration
  std::string origin_;
};

}  // namespace rdae

#endif  // RDAE_CONFIG_HPP_
