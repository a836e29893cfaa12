// Copyright 2026 The mcm-avqa Authors
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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Little-endian encoding helpers for the dataset and checkpoint containers.
namespace avqa::io {

class ByteWriter {
 public:
  void bytes(std::string_view s);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void f64s(std::span<const double> v);
  void str(std::string_view s);  // u32 length + bytes

  const std::string& data() const noexcept { return buf_; }

 private:
  std::string buf_;
};

// Reads from an in-memory buffer; every failure is a FormatError carrying the
// byte offset.
class ByteReader {
 public:
  explicit ByteReader(std::string data) : buf_(std::move(data)) {}

  void expect(std::string_view magic, const char* what);
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::vector<double> f64s(std::uint64_t count);
  std::string str();

  std::uint64_t offset() const noexcept { return pos_; }
  bool at_end() const noexcept { return pos_ == buf_.size(); }
  [[noreturn]] void fail(const std::string& what) const;

 private:
  void need(std::uint64_t n, const char* what);

  std::string buf_;
  std::uint64_t pos_ = 0;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view data);

// FNV-1a 64-bit, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace avqa::io
