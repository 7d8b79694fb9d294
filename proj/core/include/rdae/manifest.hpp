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

#ifndef RDAE_MANIFEST_HPP_
#define RDAE_MANIFEST_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rdae {

// One conditioned segment version. A manifest line carries everything needed
// to regenerate the exact waveform from the source files: the augmentation
// seed plus (noise, SNR) identify the RNG stream, and rescale_factor records
// the anti-clipping gain that was applied after mixing.
struct ManifestEntry {
  std::string group_key;      // utterance_id + ":" + segment_index
  std::string speaker_id;
  std::string utterance_id;
  int segment_index = 0;
  std::optional<std::string> noise_name;  // nullopt for the clean version
  std::optional<int> snr_db;              // nullopt encodes "clean"
  double rescale_factor = 1.0;
  std::int64_t cache_offset = -1;  // byte offset in the feature cache, -1 until written
  std::string source_path;         // audio file the segment came from
  std::optional<std::string> noise_path;  // noise WAV of a contaminated version
  std::uint64_t augment_seed = 0;  // master seed the mixing streams derive from
};

// Serialize one entry as a single JSON object line (no trailing newline).
std::string manifest_line(const ManifestEntry& entry);

// Parse one JSON object line; `lineno` is used in error messages (1-based).
ManifestEntry parse_manifest_line(const std::string& line, int lineno);

// Whole-file JSONL round trip. Reading skips blank lines and throws
// DataError on malformed records, IoError when the file cannot be opened.
void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> read_manifest(const std::string& path);

}  // namespace rdae

#endif  // RDAE_MANIFEST_HPP_
