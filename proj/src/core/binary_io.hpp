// Copyright 2026 The GMP Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GMP_CORE_BINARY_IO_HPP_
#define GMP_CORE_BINARY_IO_HPP_

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gmp/error.hpp"

namespace gmp::io {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian hosts are not supported");

template <typename T>
T to_little(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(value);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  } else {
    return value;
  }
}

class ByteWriter {
 public:
  void put_bytes(std::string_view s) {
    buffer_.insert(buffer_.end(), s.begin(), s.end());
  }
  template <typename T>
  void put(T value) {
    T le = to_little(value);
    const auto* p = reinterpret_cast<const std::uint8_t*>(&le);
    buffer_.insert(buffer_.end(), p, p + sizeof(T));
  }
  std::vector<std::uint8_t>& bytes() { return buffer_; }
  std::vector<std::uint8_t> take() { return std::move(buffer_); }

 private:
  std::vector<std::uint8_t> buffer_;
};

// Bounds-checked little-endian reader. Every failure names the byte offset
// where decoding stopped.
class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, std::string what)
      : bytes_(bytes), what_(std::move(what)) {}

  template <typename T>
  T get(const char* field) {
    require(sizeof(T), field);
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return to_little(value);
  }
  std::span<const std::uint8_t> get_span(std::size_t n, const char* field) {
    require(n, field);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  void expect_magic(std::string_view magic) {
    auto s = get_span(magic.size(), "magic");
    if (std::memcmp(s.data(), magic.data(), magic.size()) != 0) {
      fail(pos_ - magic.size(), "bad magic, expected \"" +
                                    std::string(magic) + "\"");
    }
  }
  void expect_end() const {
    if (pos_ != bytes_.size()) {
      fail(pos_, std::to_string(bytes_.size() - pos_) + " trailing bytes");
    }
  }
  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  [[noreturn]] void fail(std::size_t offset, const std::string& msg) const {
    throw FormatError(what_ + ": " + msg + " at offset " +
                      std::to_string(offset));
  }

 private:
  void require(std::size_t n, const char* field) const {
    if (bytes_.size() - pos_ < n) {
      fail(pos_, std::string("truncated while reading ") + field);
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::string what_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace gmp::io

#endif  // GMP_CORE_BINARY_IO_HPP_
