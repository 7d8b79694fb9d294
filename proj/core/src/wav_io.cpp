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

#include "rdae/wav_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "rdae/error.hpp"

namespace rdae {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}

}  // namespace

AudioClip load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAV file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw DataError("malformed WAV header: " + path);
  }

  // Chunk walk; only fmt and data matter.
  std::size_t pos = 12;
  bool have_fmt = false;
  std::uint16_t format_tag = 0, num_channels = 0, bits_per_sample = 0;
  std::uint32_t sample_rate = 0;
  const unsigned char* data = nullptr;
  std::uint32_t data_len = 0;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const std::uint32_t len = read_u32(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + len > bytes.size()) throw DataError("truncated WAV chunk: " + path);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (len < 16) throw DataError("malformed fmt chunk: " + path);
      format_tag = read_u16(bytes.data() + body);
      num_channels = read_u16(bytes.data() + body + 2);
      sample_rate = read_u32(bytes.data() + body + 4);
      bits_per_sample = read_u16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.data() + body;
      data_len = len;
    }
    pos = body + len + (len & 1);  // chunks are word-aligned
  }
  if (!have_fmt || data == nullptr) throw DataError("missing fmt or data chunk: " + path);

  if (format_tag == 3) throw DataError("unsupported WAV encoding (IEEE float): " + path);
  if (format_tag != 1) {
    throw DataError("unsupported WAV encoding (format tag " +
                    std::to_string(format_tag) + "): " + path);
  }
  if (bits_per_sample != 16) {
    throw DataError("unsupported WAV encoding (" + std::to_string(bits_per_sample) +
                    "-bit PCM): " + path);
  }
  if (num_channels < 1 || num_channels > 2) {
    throw DataError("unsupported channel count " + std::to_string(num_channels) + ": " + path);
  }
  if (sample_rate == 0) throw DataError("zero sample rate: " + path);

  const std::size_t frame_bytes = 2u * num_channels;
  const std::size_t frames = data_len / frame_bytes;

  AudioClip clip;
  clip.sample_rate_hz = static_cast<int>(sample_rate);
  clip.utterance_id = std::filesystem::path(path).stem().string();
  clip.channels.assign(num_channels, std::vector<double>(frames));
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::uint16_t c = 0; c < num_channels; ++c) {
      const unsigned char* p = data + f * frame_bytes + 2u * c;
      const std::int16_t v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
      clip.channels[c][f] = static_cast<double>(v) / 32768.0;
    }
  }
  return clip;
}

void write_wav(const std::string& path, const AudioClip& clip) {
  if (clip.num_channels() < 1 || clip.num_channels() > 2) {
    throw ArgumentError("write_wav: need 1 or 2 channels");
  }
  if (clip.sample_rate_hz <= 0) throw ArgumentError("write_wav: bad sample rate");
  const std::size_t frames = clip.num_frames();
  for (const auto& ch : clip.channels) {
    if (ch.size() != frames) throw ArgumentError("write_wav: ragged channels");
  }

  const std::uint16_t nch = static_cast<std::uint16_t>(clip.num_channels());
  const std::uint32_t rate = static_cast<std::uint32_t>(clip.sample_rate_hz);
  const std::uint32_t data_len = static_cast<std::uint32_t>(frames * 2u * nch);

  std::vector<unsigned char> out;
  out.reserve(44 + data_len);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_len);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, nch);
  put_u32(out, rate);
  put_u32(out, rate * 2u * nch);  // byte rate
  put_u16(out, static_cast<std::uint16_t>(2u * nch));
  put_u16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_len);
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::uint16_t c = 0; c < nch; ++c) {
      double x = clip.channels[c][f];
      if (x > 32767.0 / 32768.0) x = 32767.0 / 32768.0;
      if (x < -1.0) x = -1.0;
      const auto v = static_cast<std::int16_t>(std::lround(x * 32768.0));
      put_u16(out, static_cast<std::uint16_t>(v));
    }
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write WAV file: " + path);
  os.write(reinterpret_cast<const char*>(out.data()),
           static_cast<std::streamsize>(out.size()));
  if (!os) throw IoError("short write: " + path);
}

}  // namespace rdae
