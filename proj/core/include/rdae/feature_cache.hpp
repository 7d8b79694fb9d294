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

#ifndef RDAE_FEATURE_CACHE_HPP_
#define RDAE_FEATURE_CACHE_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rdae {

// MELC binary feature cache.
//
// File layout (all integers little-endian):
//   bytes 0..3   magic "MELC"
//   u32          format version (currently 1)
//   u64          record count (patched on finalize)
//   u32 + bytes  global JSON header: {"kind","dims","dtype","order","layout"}
//   records      each: u32 + bytes JSON metadata, u32 float count,
//                then that many IEEE-754 f32 values, row-major.
//
// Features are stored exactly as computed (no normalization); statistics are
// always refit downstream on whichever subset is being trained on.

struct CacheHeader {
  std::string kind;        // "mel" or "handcrafted"
  std::vector<int> dims;   // {27, 140} for mel grids, {40} for handcrafted
  std::string layout;      // human-readable description of the value layout
};

// Identity of one cached record; mirrors the manifest fields.
struct CacheRecordMeta {
  std::string group_key;
  std::string speaker_id;
  std::string utterance_id;
  int segment_index = 0;
  std::optional<std::string> noise_name;
  std::optional<int> snr_db;
};

class FeatureCacheWriter {
 public:
  FeatureCacheWriter(const std::string& path, CacheHeader header);
  ~FeatureCacheWriter();
  FeatureCacheWriter(const FeatureCacheWriter&) = delete;
  FeatureCacheWriter& operator=(const FeatureCacheWriter&) = delete;

  // Appends one record; features must match header dims (row-major flatten).
  // Returns the byte offset of the record start, for the manifest.
  std::int64_t append(const CacheRecordMeta& meta, const Eigen::MatrixXd& features);

  // Patches the record count into the header. Idempotent; the destructor
  // calls it if it has not been called.
  void finalize();

 private:
  std::ofstream out_;
  std::string path_;
  CacheHeader header_;
  std::uint64_t count_ = 0;
  bool finalized_ = false;
};

struct CacheRecord {
  CacheRecordMeta meta;
  Eigen::MatrixXd features;  // dims[0] x dims[1] (vectors come back as 1 x N)
  std::int64_t offset = -1;
};

class FeatureCacheReader {
 public:
  explicit FeatureCacheReader(const std::string& path);

  const CacheHeader& header() const { return header_; }
  std::size_t size() const { return offsets_.size(); }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }

  CacheRecord read_index(std::size_t index) const;
  CacheRecord read_offset(std::int64_t offset) const;

 private:
  CacheRecord read_at(std::int64_t offset) const;

  mutable std::ifstream in_;
  std::string path_;
  CacheHeader header_;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  std::vector<std::int64_t> offsets_;
};

}  // namespace rdae

#endif  // RDAE_FEATURE_CACHE_HPP_
