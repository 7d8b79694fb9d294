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

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "rdae/error.hpp"
#include "rdae/manifest.hpp"

namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "rdae_manifest_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

rdae::ManifestEntry contaminated_entry() {
  rdae::ManifestEntry e;
  e.group_key = "spk01/utt003:2";
  e.speaker_id = "spk01";
  e.utterance_id = "spk01/utt003";
  e.segment_index = 2;
  e.noise_name = "babble";
  e.snr_db = -5;
  e.rescale_factor = 0.87654321;
  e.cache_offset = 4096;
  e.source_path = "corpus/speech/spk01/utt003.wav";
  e.noise_path = "corpus/noise/babble.wav";
  e.augment_seed = 0xdeadbeefcafef00dULL;
  return e;
}

rdae::ManifestEntry clean_entry() {
  rdae::ManifestEntry e;
  e.group_key = "spk02/utt000:0";
  e.speaker_id = "spk02";
  e.utterance_id = "spk02/utt000";
  e.segment_index = 0;
  e.source_path = "corpus/speech/spk02/utt000.wav";
  e.augment_seed = 42;
  return e;
}

}  // namespace

TEST_CASE("a contaminated entry round-trips through one line") {
  const rdae::ManifestEntry e = contaminated_entry();
  const std::string line = rdae::manifest_line(e);
  CHECK(line.find('\n') == std::string::npos);
  const rdae::ManifestEntry back = rdae::parse_manifest_line(line, 1);
  CHECK(back.group_key == e.group_key);
  CHECK(back.speaker_id == e.speaker_id);
  CHECK(back.utterance_id == e.utterance_id);
  CHECK(back.segment_index == e.segment_index);
  REQUIRE(back.noise_name.has_value());
  CHECK(*back.noise_name == "babble");
  REQUIRE(back.snr_db.has_value());
  CHECK(*back.snr_db == -5);
  CHECK(back.rescale_factor == e.rescale_factor);
  CHECK(back.cache_offset == 4096);
  CHECK(back.source_path == e.source_path);
  REQUIRE(back.noise_path.has_value());
  CHECK(*back.noise_path == "corpus/noise/babble.wav");
  CHECK(back.augment_seed == e.augment_seed);
}

TEST_CASE("a clean entry encodes snr as the string clean") {
  const rdae::ManifestEntry e = clean_entry();
  const std::string line = rdae::manifest_line(e);
  CHECK(line.find("\"clean\"") != std::string::npos);
  const rdae::ManifestEntry back = rdae::parse_manifest_line(line, 1);
  CHECK_FALSE(back.noise_name.has_value());
  CHECK_FALSE(back.snr_db.has_value());
  CHECK_FALSE(back.noise_path.has_value());
  CHECK(back.cache_offset == -1);
  CHECK(back.rescale_factor == 1.0);
}

TEST_CASE("whole-file round trip preserves order and content") {
  std::vector<rdae::ManifestEntry> entries = {clean_entry(), contaminated_entry()};
  const std::string path = (temp_dir() / "m.jsonl").string();
  rdae::write_manifest(path, entries);
  const auto back = rdae::read_manifest(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].group_key == entries[0].group_key);
  CHECK(back[1].group_key == entries[1].group_key);
  CHECK(back[1].rescale_factor == entries[1].rescale_factor);
  // Re-serializing gives byte-identical lines.
  CHECK(rdae::manifest_line(back[1]) == rdae::manifest_line(entries[1]));
}

TEST_CASE("read_manifest skips blank lines") {
  const std::string path = (temp_dir() / "blanks.jsonl").string();
  {
    std::ofstream out(path);
    out << "\n" << rdae::manifest_line(clean_entry()) << "\n\n\n"
        << rdae::manifest_line(contaminated_entry()) << "\n\n";
  }
  const auto back = rdae::read_manifest(path);
  CHECK(back.size() == 2);
}

TEST_CASE("malformed records report the line number") {
  const std::string path = (temp_dir() / "bad.jsonl").string();
  {
    std::ofstream out(path);
    out << rdae::manifest_line(clean_entry()) << "\n";
    out << "{ this is not json }\n";
  }
  try {
    rdae::read_manifest(path);
    FAIL("expected DataError");
  } catch (const rdae::DataError& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("a missing required field is a DataError") {
  std::string line = rdae::manifest_line(clean_entry());
  // Drop the group_key field wholesale.
  const auto pos = line.find("\"group_key\"");
  REQUIRE(pos != std::string::npos);
  const auto comma = line.find(',', pos);
  REQUIRE(comma != std::string::npos);
  line.erase(pos, comma - pos + 1);
  CHECK_THROWS_AS(rdae::parse_manifest_line(line, 7), rdae::DataError);
}

TEST_CASE("a non-integer snr is a DataError") {
  std::string line = rdae::manifest_line(contaminated_entry());
  const auto pos = line.find("-5");
  REQUIRE(pos != std::string::npos);
  line.replace(pos, 2, "\"loud\"");
  CHECK_THROWS_AS(rdae::parse_manifest_line(line, 3), rdae::DataError);
}

TEST_CASE("reading a missing file is an IoError") {
  CHECK_THROWS_AS(rdae::read_manifest((temp_dir() / "nope.jsonl").string()),
                  rdae::IoError);
}
