// voxkit/wave.hpp
//
// Copyright 2026  The voxkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.
//
// RIFF/WAVE decode and encode. Read accepts PCM 16-bit and IEEE-float 32-bit,
// 1-2 channels; everything comes back as a mono clip in [-1,1]. Write always
// produces 16-bit PCM mono.
//
// Amplitude convention: 16-bit sample s maps to s/32768 (symmetric divisor).
// On write, q = round(x * 32768) clamped to [-32768, 32767]; samples whose
// quantized value falls outside int16 range are counted as clipped.

#pragma once

#include <unistd.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "voxkit/core.hpp"

namespace voxkit {

struct WaveWriteResult {
  std::size_t clipped = 0;  // samples clamped to full scale
};

namespace wave_detail {

inline std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void put_u32le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline void put_u16le(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

inline const char* format_name(std::uint16_t tag) {
  switch (tag) {
    case 0x0002: return "ADPCM (2)";
    case 0x0006: return "A-law (6)";
    case 0x0007: return "mu-law (7)";
    case 0xFFFE: return "WAVE_FORMAT_EXTENSIBLE (0xFFFE)";
    default: return nullptr;
  }
}

}  // namespace wave_detail

struct WaveInfo {
  int sample_rate = 0;
  std::uint16_t channels = 0;
  std::uint64_t frames = 0;  // samples per channel

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(frames) / sample_rate : 0.0;
  }
};

// Header-only probe; does not decode samples.
inline WaveInfo probe_wave(const std::string& path) {
  using namespace wave_detail;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAVE file: " + path);
  unsigned char hdr[12];
  if (!in.read(reinterpret_cast<char*>(hdr), 12) || std::memcmp(hdr, "RIFF", 4) != 0 ||
      std::memcmp(hdr + 8, "WAVE", 4) != 0)
    throw FormatError("not a RIFF/WAVE file: " + path);

  WaveInfo info;
  std::uint16_t bits = 0;
  std::uint32_t data_size = 0;
  bool have_fmt = false, have_data = false;
  unsigned char chunk[8];
  while (in.read(reinterpret_cast<char*>(chunk), 8)) {
    std::uint32_t size = read_u32le(chunk + 4);
    if (std::memcmp(chunk, "fmt ", 4) == 0 && size >= 16) {
      unsigned char body[16];
      if (!in.read(reinterpret_cast<char*>(body), 16))
        throw FormatError("truncated fmt chunk: " + path);
      info.channels = read_u16le(body + 2);
      info.sample_rate = static_cast<int>(read_u32le(body + 4));
      bits = read_u16le(body + 14);
      have_fmt = true;
      in.seekg(size - 16 + (size & 1), std::ios::cur);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data_size = size;
      have_data = true;
      in.seekg(size + (size & 1), std::ios::cur);
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
    }
  }
  if (!have_fmt || !have_data) throw FormatError("missing fmt or data chunk: " + path);
  if (info.channels == 0 || bits == 0) throw FormatError("bad fmt chunk: " + path);
  info.frames = data_size / (info.channels * (bits / 8));
  return info;
}

// Decodes a WAVE file to a mono clip. Channels are averaged; amplitudes are
// scaled to [-1,1]; sample_rate is preserved. source_id defaults to the file
// stem.
inline AudioClip read_wave(const std::string& path) {
  using namespace wave_detail;

  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAVE file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw FormatError("not a RIFF/WAVE file: " + path);

  bool have_fmt = false;
  std::uint16_t format_tag = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::uint32_t data_size = 0;

  // Walk chunks; fmt and data are mandatory, anything else is skipped.
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + pos;
    std::uint32_t size = read_u32le(hdr + 4);
    std::size_t body = pos + 8;
    if (body + size > bytes.size())
      throw FormatError("truncated chunk in WAVE file: " + path);
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (size < 16) throw FormatError("fmt chunk too small: " + path);
      format_tag = read_u16le(bytes.data() + body);
      channels = read_u16le(bytes.data() + body + 2);
      rate = read_u32le(bytes.data() + body + 4);
      bits = read_u16le(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = size;
    }
    pos = body + size + (size & 1);  // chunks are word-aligned
  }

  if (!have_fmt) throw FormatError("missing fmt chunk: " + path);
  if (data == nullptr) throw FormatError("missing data chunk: " + path);
  if (rate == 0) throw FormatError("zero sample rate: " + path);
  if (channels < 1 || channels > 2)
    throw UnsupportedError("unsupported channel count " + std::to_string(channels) +
                           " (expected 1-2): " + path);

  bool pcm16 = (format_tag == 1 && bits == 16);
  bool float32 = (format_tag == 3 && bits == 32);
  if (!pcm16 && !float32) {
    const char* name = format_name(format_tag);
    std::string enc = name ? std::string(name)
                           : "format tag " + std::to_string(format_tag) + ", " +
                                 std::to_string(bits) + "-bit";
    throw UnsupportedError("unsupported WAVE encoding " + enc + ": " + path);
  }

  std::size_t bytes_per_sample = pcm16 ? 2 : 4;
  std::size_t frame_bytes = bytes_per_sample * channels;
  std::size_t n_frames = data_size / frame_bytes;
  if (n_frames == 0) throw FormatError("empty data chunk: " + path);

  AudioClip clip;
  clip.sample_rate = static_cast<int>(rate);
  clip.source_id = std::filesystem::path(path).stem().string();
  clip.samples.resize(n_frames);

  for (std::size_t f = 0; f < n_frames; ++f) {
    double acc = 0.0;
    for (std::uint16_t c = 0; c < channels; ++c) {
      const unsigned char* p = data + f * frame_bytes + c * bytes_per_sample;
      if (pcm16) {
        std::int16_t s = static_cast<std::int16_t>(read_u16le(p));
        acc += static_cast<double>(s) / 32768.0;
      } else {
        float v;
        std::uint32_t u = read_u32le(p);
        std::memcpy(&v, &u, 4);
        double d = static_cast<double>(v);
        if (d > 1.0) d = 1.0;
        if (d < -1.0) d = -1.0;
        acc += d;
      }
    }
    clip.samples[f] = acc / channels;
  }
  return clip;
}

// Encodes a clip as 16-bit PCM mono, atomically. read_wave(write_wave(x))
// reproduces samples within 1 LSB (2^-15); 16-bit-exact inputs round-trip
// bit-identically.
inline WaveWriteResult write_wave(const AudioClip& clip, const std::string& path) {
  using namespace wave_detail;

  if (clip.samples.empty())
    throw PreconditionError("write_wave: clip has no samples");
  if (clip.sample_rate <= 0)
    throw PreconditionError("write_wave: non-positive sample rate");

  WaveWriteResult result;
  std::uint32_t n = static_cast<std::uint32_t>(clip.samples.size());
  std::uint32_t data_size = n * 2;

  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  put_u32le(out, 36 + data_size);
  out += "WAVE";
  out += "fmt ";
  put_u32le(out, 16);
  put_u16le(out, 1);  // PCM
  put_u16le(out, 1);  // mono
  put_u32le(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32le(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);  // byte rate
  put_u16le(out, 2);   // block align
  put_u16le(out, 16);  // bits
  out += "data";
  put_u32le(out, data_size);

  for (double x : clip.samples) {
    long long q = std::llround(x * 32768.0);
    if (q > 32767) {
      q = 32767;
      ++result.clipped;
    } else if (q < -32768) {
      q = -32768;
      ++result.clipped;
    }
    put_u16le(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }

  // Atomic: temp file in the target directory, then rename.
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path dir = target.parent_path();
  if (dir.empty()) dir = ".";
  fs::path tmp = dir / (target.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open for write: " + tmp.string());
    os.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!os) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("rename failed for " + path);
  }
  return result;
}

}  // namespace voxkit
