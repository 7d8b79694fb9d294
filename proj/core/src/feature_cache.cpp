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

#include "rdae/feature_cache.hpp"

#include <bit>
#include <cstring>

#include <nlohmann/json.hpp>

#include "rdae/error.hpp"

namespace rdae {
namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'M', 'E', 'L', 'C'};
constexpr std::uint32_t kVersion = 1;
constexpr std::int64_t kCountOffset = 8;  // magic + version

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void put_f32(std::ostream& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

std::uint32_t get_u32(std::istream& in, const std::string& what) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw DataError("feature cache: truncated while reading " + what);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& in, const std::string& what) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw DataError("feature cache: truncated while reading " + what);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

std::string get_bytes(std::istream& in, std::uint32_t n, const std::string& what) {
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw DataError("feature cache: truncated while reading " + what);
  return s;
}

json meta_to_json(const CacheRecordMeta& m) {
  json j;
  j["group_key"] = m.group_key;
  j["speaker_id"] = m.speaker_id;
  j["utterance_id"] = m.utterance_id;
  j["segment_index"] = m.segment_index;
  j["noise_name"] = m.noise_name ? json(*m.noise_name) : json(nullptr);
  j["snr_db"] = m.snr_db ? json(*m.snr_db) : json("clean");
  return j;
}

CacheRecordMeta meta_from_json(const json& j) {
  CacheRecordMeta m;
  m.group_key = j.at("group_key").get<std::string>();
  m.speaker_id = j.at("speaker_id").get<std::string>();
  m.utterance_id = j.at("utterance_id").get<std::string>();
  m.segment_index = j.at("segment_index").get<int>();
  if (!j.at("noise_name").is_null()) m.noise_name = j.at("noise_name").get<std::string>();
  if (j.at("snr_db").is_number_integer()) m.snr_db = j.at("snr_db").get<int>();
  return m;
}

}  // namespace

FeatureCacheWriter::FeatureCacheWriter(const std::string& path, CacheHeader header)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path), header_(std::move(header)) {
  if (!out_) throw IoError("cannot open feature cache for writing: " + path);
  if (header_.dims.empty() || header_.dims.size() > 2) {
    throw ArgumentError("feature cache: dims must have 1 or 2 entries");
  }
  out_.write(kMagic, 4);
  put_u32(out_, kVersion);
  put_u64(out_, 0);  // record count placeholder, patched by finalize()
  json g;
  g["kind"] = header_.kind;
  g["dims"] = header_.dims;
  g["dtype"] = "f32";
  g["order"] = "row-major";
  g["layout"] = header_.layout;
  const std::string gs = g.dump();
  put_u32(out_, static_cast<std::uint32_t>(gs.size()));
  out_.write(gs.data(), static_cast<std::streamsize>(gs.size()));
  if (!out_) throw IoError("short write to feature cache: " + path);
}

FeatureCacheWriter::~FeatureCacheWriter() {
  try {
    finalize();
  } catch (...) {
    // Destructors must not throw; a failed patch leaves count 0, which the
    // reader reports as a corrupt cache.
  }
}

std::int64_t FeatureCacheWriter::append(const CacheRecordMeta& meta,
                                        const Eigen::MatrixXd& features) {
  if (finalized_) throw ArgumentError("feature cache: append after finalize");
  const Eigen::Index want_rows = header_.dims.size() == 2 ? header_.dims[0] : 1;
  const Eigen::Index want_cols =
      header_.dims.size() == 2 ? header_.dims[1] : header_.dims[0];
  if (features.rows() != want_rows || features.cols() != want_cols) {
    throw ArgumentError("feature cache: record shape " + std::to_string(features.rows()) +
                        "x" + std::to_string(features.cols()) + " does not match header " +
                        std::to_string(want_rows) + "x" + std::to_string(want_cols));
  }
  const std::int64_t offset = static_cast<std::int64_t>(out_.tellp());
  const std::string ms = meta_to_json(meta).dump();
  put_u32(out_, static_cast<std::uint32_t>(ms.size()));
  out_.write(ms.data(), static_cast<std::streamsize>(ms.size()));
  put_u32(out_, static_cast<std::uint32_t>(features.size()));
  for (Eigen::Index r = 0; r < features.rows(); ++r) {
    for (Eigen::Index c = 0; c < features.cols(); ++c) {
      put_f32(out_, static_cast<float>(features(r, c)));
    }
  }
  if (!out_) throw IoError("short write to feature cache: " + path_);
  ++count_;
  return offset;
}

void FeatureCacheWriter::finalize() {
  if (finalized_) return;
  finalized_ = true;
  out_.seekp(kCountOffset);
  put_u64(out_, count_);
  out_.flush();
  if (!out_) throw IoError("failed to patch record count: " + path_);
}

FeatureCacheReader::FeatureCacheReader(const std::string& path)
    : in_(path, std::ios::binary), path_(path) {
  if (!in_) throw IoError("cannot open feature cache: " + path);
  char magic[4];
  in_.read(magic, 4);
  if (!in_ || std::memcmp(magic, kMagic, 4) != 0) {
    throw DataError("not a MELC feature cache: " + path);
  }
  const std::uint32_t version = get_u32(in_, "version");
  if (version != kVersion) {
    throw DataError("unsupported feature cache version " + std::to_string(version) +
                    " in " + path);
  }
  const std::uint64_t count = get_u64(in_, "record count");
  const std::uint32_t glen = get_u32(in_, "global header length");
  const std::string gs = get_bytes(in_, glen, "global header");
  json g;
  try {
    g = json::parse(gs);
    header_.kind = g.at("kind").get<std::string>();
    header_.dims = g.at("dims").get<std::vector<int>>();
    header_.layout = g.at("layout").get<std::string>();
  } catch (const json::exception& err) {
    throw DataError("feature cache global header malformed in " + path + ": " + err.what());
  }
  if (header_.dims.empty() || header_.dims.size() > 2) {
    throw DataError("feature cache: dims must have 1 or 2 entries: " + path);
  }
  rows_ = header_.dims.size() == 2 ? header_.dims[0] : 1;
  cols_ = header_.dims.size() == 2 ? header_.dims[1] : header_.dims[0];

  // Index pass: records are length-prefixed, so one scan collects offsets.
  offsets_.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::int64_t offset = static_cast<std::int64_t>(in_.tellg());
    const std::uint32_t mlen = get_u32(in_, "record metadata length");
    in_.seekg(mlen, std::ios::cur);
    const std::uint32_t flen = get_u32(in_, "record float count");
    if (flen != static_cast<std::uint32_t>(rows_ * cols_)) {
      throw DataError("feature cache: record " + std::to_string(i) + " has " +
                      std::to_string(flen) + " values, header dims imply " +
                      std::to_string(rows_ * cols_));
    }
    in_.seekg(static_cast<std::streamoff>(flen) * 4, std::ios::cur);
    if (!in_) throw DataError("feature cache: truncated record " + std::to_string(i));
    offsets_.push_back(offset);
  }
}

CacheRecord FeatureCacheReader::read_index(std::size_t index) const {
  if (index >= offsets_.size()) {
    throw ArgumentError("feature cache: record index " + std::to_string(index) +
                        " out of range (have " + std::to_string(offsets_.size()) + ")");
  }
  return read_at(offsets_[index]);
}

CacheRecord FeatureCacheReader::read_offset(std::int64_t offset) const {
  return read_at(offset);
}

CacheRecord FeatureCacheReader::read_at(std::int64_t offset) const {
  in_.clear();
  in_.seekg(offset);
  if (!in_) throw DataError("feature cache: bad record offset " + std::to_string(offset));
  CacheRecord rec;
  rec.offset = offset;
  const std::uint32_t mlen = get_u32(in_, "record metadata length");
  const std::string ms = get_bytes(in_, mlen, "record metadata");
  try {
    rec.meta = meta_from_json(json::parse(ms));
  } catch (const json::exception& err) {
    throw DataError("feature cache: record metadata malformed at offset " +
                    std::to_string(offset) + ": " + err.what());
  }
  const std::uint32_t flen = get_u32(in_, "record float count");
  if (flen != static_cast<std::uint32_t>(rows_ * cols_)) {
    throw DataError("feature cache: record at offset " + std::to_string(offset) +
                    " does not match header dims");
  }
  const std::string payload = get_bytes(in_, flen * 4, "record payload");
  rec.features.resize(rows_, cols_);
  const unsigned char* p = reinterpret_cast<const unsigned char*>(payload.data());
  for (Eigen::Index r = 0; r < rows_; ++r) {
    for (Eigen::Index c = 0; c < cols_; ++c) {
      std::uint32_t bits = 0;
      for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(p[i]) << (8 * i);
      p += 4;
      rec.features(r, c) = static_cast<double>(std::bit_cast<float>(bits));
    }
  }
  return rec;
}

}  // namespace rdae
