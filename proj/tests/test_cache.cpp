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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "rdae/error.hpp"
#include "rdae/feature_cache.hpp"
#include "rdae/rng.hpp"

namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "rdae_cache_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

rdae::CacheHeader mel_header() {
  rdae::CacheHeader h;
  h.kind = "mel";
  h.dims = {27, 140};
  h.layout = "27x140 log-mel, row-major, time-major";
  return h;
}

rdae::CacheRecordMeta meta_for(int i) {
  rdae::CacheRecordMeta m;
  m.group_key = "u" + std::to_string(i) + ":0";
  m.speaker_id = "spk" + std::to_string(i % 3);
  m.utterance_id = "u" + std::to_string(i);
  m.segment_index = 0;
  if (i % 2 == 1) {
    m.noise_name = "white";
    m.snr_db = 5;
  }
  return m;
}

Eigen::MatrixXd random_features(int rows, int cols, std::uint64_t seed) {
  Eigen::MatrixXd m(rows, cols);
  rdae::Rng rng(seed);
  for (int i = 0; i < m.size(); ++i) m.data()[i] = rdae::normal(rng);
  return m;
}

}  // namespace

TEST_CASE("records round-trip exactly at f32 precision") {
  const std::string path = (temp_dir() / "rt.melc").string();
  std::vector<Eigen::MatrixXd> features;
  std::vector<std::int64_t> offsets;
  {
    rdae::FeatureCacheWriter writer(path, mel_header());
    for (int i = 0; i < 5; ++i) {
      features.push_back(random_features(27, 140, 100 + i));
      offsets.push_back(writer.append(meta_for(i), features.back()));
    }
    writer.finalize();
  }

  rdae::FeatureCacheReader reader(path);
  CHECK(reader.size() == 5);
  CHECK(reader.header().kind == "mel");
  const std::vector<int> want_dims = {27, 140};
  CHECK(reader.header().dims == want_dims);
  CHECK(reader.rows() == 27);
  CHECK(reader.cols() == 140);

  for (int i = 0; i < 5; ++i) {
    const rdae::CacheRecord rec = reader.read_index(static_cast<std::size_t>(i));
    CHECK(rec.offset == offsets[static_cast<std::size_t>(i)]);
    CHECK(rec.meta.group_key == meta_for(i).group_key);
    CHECK(rec.meta.speaker_id == meta_for(i).speaker_id);
    CHECK((rec.meta.noise_name.has_value()) == (i % 2 == 1));
    REQUIRE(rec.features.rows() == 27);
    REQUIRE(rec.features.cols() == 140);
    // Values pass through a float32 cast and nothing else.
    for (int r = 0; r < 27; ++r)
      for (int c = 0; c < 140; ++c) {
        const double want =
            static_cast<double>(static_cast<float>(features[static_cast<std::size_t>(i)](r, c)));
        CHECK(rec.features(r, c) == want);
      }
  }
}

TEST_CASE("read_offset returns the same record as read_index") {
  const std::string path = (temp_dir() / "off.melc").string();
  std::vector<std::int64_t> offsets;
  {
    rdae::FeatureCacheWriter writer(path, mel_header());
    for (int i = 0; i < 3; ++i)
      offsets.push_back(writer.append(meta_for(i), random_features(27, 140, 7 + i)));
  }
  rdae::FeatureCacheReader reader(path);
  for (int i = 0; i < 3; ++i) {
    const auto by_index = reader.read_index(static_cast<std::size_t>(i));
    const auto by_offset = reader.read_offset(offsets[static_cast<std::size_t>(i)]);
    CHECK(by_index.meta.group_key == by_offset.meta.group_key);
    CHECK((by_index.features - by_offset.features).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("the destructor finalizes the record count") {
  const std::string path = (temp_dir() / "dtor.melc").string();
  {
    rdae::FeatureCacheWriter writer(path, mel_header());
    writer.append(meta_for(0), random_features(27, 140, 1));
    writer.append(meta_for(1), random_features(27, 140, 2));
    // no explicit finalize()
  }
  rdae::FeatureCacheReader reader(path);
  CHECK(reader.size() == 2);
}

TEST_CASE("handcrafted caches store 1x40 vectors") {
  rdae::CacheHeader h;
  h.kind = "handcrafted";
  h.dims = {40};
  h.layout = "40 aggregate slots";
  const std::string path = (temp_dir() / "hc.melc").string();
  {
    rdae::FeatureCacheWriter writer(path, h);
    writer.append(meta_for(0), random_features(1, 40, 9));
  }
  rdae::FeatureCacheReader reader(path);
  CHECK(reader.header().kind == "handcrafted");
  const auto rec = reader.read_index(0);
  CHECK(rec.features.rows() == 1);
  CHECK(rec.features.cols() == 40);
}

TEST_CASE("append rejects feature shapes that contradict the header") {
  const std::string path = (temp_dir() / "shape.melc").string();
  rdae::FeatureCacheWriter writer(path, mel_header());
  CHECK_THROWS_AS(writer.append(meta_for(0), random_features(27, 139, 1)),
                  rdae::ArgumentError);
  CHECK_THROWS_AS(writer.append(meta_for(0), random_features(26, 140, 1)),
                  rdae::ArgumentError);
}

TEST_CASE("a wrong magic is rejected") {
  const std::string path = (temp_dir() / "magic.melc").string();
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOPE" << std::string(64, '\0');
  }
  CHECK_THROWS_AS(rdae::FeatureCacheReader{path}, rdae::DataError);
}

TEST_CASE("an unsupported version is rejected") {
  const std::string good = (temp_dir() / "v_good.melc").string();
  {
    rdae::FeatureCacheWriter writer(good, mel_header());
    writer.append(meta_for(0), random_features(27, 140, 3));
  }
  // Bump the version field (bytes 4..7) to 99.
  std::ifstream in(good, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  in.close();
  bytes[4] = 99;
  const std::string bad = (temp_dir() / "v_bad.melc").string();
  std::ofstream out(bad, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  CHECK_THROWS_AS(rdae::FeatureCacheReader{bad}, rdae::DataError);
}

TEST_CASE("a truncated record payload is rejected") {
  const std::string good = (temp_dir() / "t_good.melc").string();
  {
    rdae::FeatureCacheWriter writer(good, mel_header());
    writer.append(meta_for(0), random_features(27, 140, 4));
    writer.append(meta_for(1), random_features(27, 140, 5));
  }
  std::ifstream in(good, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  in.close();
  bytes.resize(bytes.size() - 100);  // cut into the last record's floats
  const std::string bad = (temp_dir() / "t_bad.melc").string();
  std::ofstream out(bad, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  CHECK_THROWS_AS(rdae::FeatureCacheReader{bad}, rdae::DataError);
}

TEST_CASE("reading a missing cache is an IoError") {
  CHECK_THROWS_AS(rdae::FeatureCacheReader((temp_dir() / "none.melc").string()),
                  rdae::IoError);
}

TEST_CASE("read_index past the end is an ArgumentError") {
  const std::string path = (temp_dir() / "range.melc").string();
  {
    rdae::FeatureCacheWriter writer(path, mel_header());
    writer.append(meta_for(0), random_features(27, 140, 6));
  }
  rdae::FeatureCacheReader reader(path);
  CHECK_THROWS_AS(reader.read_index(1), rdae::ArgumentError);
}
