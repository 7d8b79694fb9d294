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

#include "rdae/manifest.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "rdae/error.hpp"

namespace rdae {
namespace {

using nlohmann::json;

json to_json(const ManifestEntry& e) {
  json j;
  j["group_key"] = e.group_key;
  j["speaker_id"] = e.speaker_id;
  j["utterance_id"] = e.utterance_id;
  j["segment_index"] = e.segment_index;
  j["noise_name"] = e.noise_name ? json(*e.noise_name) : json(nullptr);
  j["snr_db"] = e.snr_db ? json(*e.snr_db) : json("clean");
  j["rescale_factor"] = e.rescale_factor;
  j["cache_offset"] = e.cache_offset;
  j["source_path"] = e.source_path;
  if (e.noise_path) j["noise_path"] = *e.noise_path;
  j["augment_seed"] = e.augment_seed;
  return j;
}

}  // namespace

std::string manifest_line(const ManifestEntry& entry) {
  return to_json(entry).dump();
}

ManifestEntry parse_manifest_line(const std::string& line, int lineno) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& err) {
    throw DataError("manifest line " + std::to_string(lineno) +
                    ": invalid JSON: " + err.what());
  }
  if (!j.is_object()) {
    throw DataError("manifest line " + std::to_string(lineno) + ": not a JSON object");
  }
  try {
    ManifestEntry e;
    e.group_key = j.at("group_key").get<std::string>();
    e.speaker_id = j.at("speaker_id").get<std::string>();
    e.utterance_id = j.at("utterance_id").get<std::string>();
    e.segment_index = j.at("segment_index").get<int>();
    const json& noise = j.at("noise_name");
    if (!noise.is_null()) e.noise_name = noise.get<std::string>();
    const json& snr = j.at("snr_db");
    if (snr.is_number_integer()) {
      e.snr_db = snr.get<int>();
    } else if (!(snr.is_string() && snr.get<std::string>() == "clean")) {
      throw DataError("manifest line " + std::to_string(lineno) +
                      ": snr_db must be an integer or \"clean\"");
    }
    e.rescale_factor = j.at("rescale_factor").get<double>();
    e.cache_offset = j.at("cache_offset").get<std::int64_t>();
    e.source_path = j.at("source_path").get<std::string>();
    if (j.contains("noise_path")) e.noise_path = j.at("noise_path").get<std::string>();
    e.augment_seed = j.at("augment_seed").get<std::uint64_t>();
    return e;
  } catch (const json::exception& err) {
    throw DataError("manifest line " + std::to_string(lineno) +
                    ": missing or mistyped field: " + err.what());
  }
}

void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open manifest for writing: " + path);
  for (const ManifestEntry& e : entries) out << manifest_line(e) << '\n';
  if (!out) throw IoError("short write to manifest: " + path);
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);
  std::vector<ManifestEntry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    entries.push_back(parse_manifest_line(line, lineno));
  }
  return entries;
}

}  // namespace rdae
