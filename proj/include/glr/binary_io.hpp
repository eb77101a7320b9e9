// Copyright 2026 The GLR Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GLR_BINARY_IO_HPP_
#define GLR_BINARY_IO_HPP_

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "glr/errors.hpp"

// Little-endian binary helpers shared by the dataset and parameter files.
// Hosts are assumed little-endian.
namespace glr::io {

class Writer {
 public:
  explicit Writer(const std::string& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw FormatError("cannot open " + path + " for writing");
  }

  void bytes(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u32(std::uint32_t v) { bytes(&v, 4); }
  void u64(std::uint64_t v) { bytes(&v, 8); }
  void f64(double v) { bytes(&v, 8); }
  void string(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

  void close() {
    out_.close();
    if (!out_) throw FormatError("write failed: " + path_);
  }

 private:
  std::string path_;
  std::ofstream out_;
};

/// Reads the whole file up front; every accessor checks for truncation.
class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    data_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }

  void bytes(void* p, std::size_t n) {
    if (data_.size() - pos_ < n) {
      throw FormatError(path_ + ": truncated file (needed " + std::to_string(n) +
                        " bytes at offset " + std::to_string(pos_) + ")");
    }
    std::memcpy(p, data_.data() + pos_, n);
    pos_ += n;
  }
  std::uint8_t u8() { std::uint8_t v; bytes(&v, 1); return v; }
  std::uint32_t u32() { std::uint32_t v; bytes(&v, 4); return v; }
  std::uint64_t u64() { std::uint64_t v; bytes(&v, 8); return v; }
  double f64() { double v; bytes(&v, 8); return v; }
  std::string string() {
    const auto n = u32();
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }

  void expect_end() const {
    if (pos_ != data_.size()) {
      throw FormatError(path_ + ": " + std::to_string(data_.size() - pos_) +
                        " trailing bytes");
    }
  }

 private:
  std::string path_;
  std::vector<char> data_;
  std::size_t pos_ = 0;
};

}  // namespace glr::io

#endif  // GLR_BINARY_IO_HPP_
