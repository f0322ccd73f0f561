// tests/test_util.hpp — shared test scaffolding.

#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace testutil {

// Unique temp directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("voxkit_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_binary(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline std::string read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

// Hand-built WAVE bytes (independent of the library writer). data holds
// interleaved int16 samples.
inline std::string wave_bytes_pcm16(const std::vector<std::int16_t>& data, std::uint16_t channels,
                                    std::uint32_t rate) {
  std::string s = "RIFF";
  put_u32(s, 36 + static_cast<std::uint32_t>(data.size() * 2));
  s += "WAVEfmt ";
  put_u32(s, 16);
  put_u16(s, 1);
  put_u16(s, channels);
  put_u32(s, rate);
  put_u32(s, rate * channels * 2);
  put_u16(s, static_cast<std::uint16_t>(channels * 2));
  put_u16(s, 16);
  s += "data";
  put_u32(s, static_cast<std::uint32_t>(data.size() * 2));
  for (std::int16_t v : data) put_u16(s, static_cast<std::uint16_t>(v));
  return s;
}

inline std::string wave_bytes_float32(const std::vector<float>& data, std::uint16_t channels,
                                      std::uint32_t rate) {
  std::string s = "RIFF";
  put_u32(s, 36 + static_cast<std::uint32_t>(data.size() * 4));
  s += "WAVEfmt ";
  put_u32(s, 16);
  put_u16(s, 3);  // IEEE float
  put_u16(s, channels);
  put_u32(s, rate);
  put_u32(s, rate * channels * 4);
  put_u16(s, static_cast<std::uint16_t>(channels * 4));
  put_u16(s, 32);
  s += "data";
  put_u32(s, static_cast<std::uint32_t>(data.size() * 4));
  for (float v : data) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    put_u32(s, u);
  }
  return s;
}

}  // namespace testutil
