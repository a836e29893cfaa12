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

#include "avqa/binary_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "avqa/error.hpp"

namespace avqa::io {
namespace {

template <typename T>
void put_le(std::string& buf, T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char tmp[sizeof(T)];
    std::memcpy(tmp, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T); ++i) buf.push_back(static_cast<char>(tmp[sizeof(T) - 1 - i]));
  } else {
    char tmp[sizeof(T)];
    std::memcpy(tmp, &v, sizeof(T));
    buf.append(tmp, sizeof(T));
  }
}

template <typename T>
T get_le(const char* p) {
  T v;
  if constexpr (std::endian::native == std::endian::big) {
    char tmp[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) tmp[i] = p[sizeof(T) - 1 - i];
    std::memcpy(&v, tmp, sizeof(T));
  } else {
    std::memcpy(&v, p, sizeof(T));
  }
  return v;
}

}  // namespace

void ByteWriter::bytes(std::string_view s) { buf_.append(s); }
void ByteWriter::u32(std::uint32_t v) { put_le(buf_, v); }
void ByteWriter::u64(std::uint64_t v) { put_le(buf_, v); }
void ByteWriter::f64(double v) { put_le(buf_, std::bit_cast<std::uint64_t>(v)); }
void ByteWriter::f64s(std::span<const double> v) {
  for (double x : v) f64(x);
}
void ByteWriter::str(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  bytes(s);
}

void ByteReader::fail(const std::string& what) const { throw FormatError(what, pos_); }

void ByteReader::need(std::uint64_t n, const char* what) {
  if (buf_.size() - pos_ < n) fail(std::string("truncated input while reading ") + what);
}

void ByteReader::expect(std::string_view magic, const char* what) {
  need(magic.size(), what);
  if (std::string_view(buf_).substr(pos_, magic.size()) != magic) fail(std::string("bad magic for ") + what);
  pos_ += magic.size();
}

std::uint32_t ByteReader::u32() {
  need(4, "u32");
  const auto v = get_le<std::uint32_t>(buf_.data() + pos_);
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8, "u64");
  const auto v = get_le<std::uint64_t>(buf_.data() + pos_);
  pos_ += 8;
  return v;
}

double ByteReader::f64() {
  need(8, "f64");
  const auto v = std::bit_cast<double>(get_le<std::uint64_t>(buf_.data() + pos_));
  pos_ += 8;
  return v;
}

std::vector<double> ByteReader::f64s(std::uint64_t count) {
  if (count > (buf_.size() - pos_) / 8) fail("array length " + std::to_string(count) + " exceeds remaining data");
  std::vector<double> out(count);
  for (double& x : out) x = f64();
  return out;
}

std::string ByteReader::str() {
  const std::uint32_t n = u32();
  need(n, "string");
  std::string s = buf_.substr(pos_, n);
  pos_ += n;
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return os.str();
}

void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("error writing '" + path + "'");
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace avqa::io
