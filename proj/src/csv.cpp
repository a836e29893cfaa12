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

#include "avqa/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "avqa/binary_io.hpp"
#include "avqa/error.hpp"

namespace avqa::harness {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw PreconditionError("CsvWriter: empty header");
}

void CsvWriter::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    throw DimensionError("CsvWriter: row has " + std::to_string(cells.size()) + " cells, header has " +
                         std::to_string(header_.size()));
  }
  rows_.push_back(std::move(cells));
}

std::string CsvWriter::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void CsvWriter::write(const std::string& path) const { io::write_file(path, str()); }

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    table.push_back(std::move(cells));
  }
  return table;
}

CsvTable read_csv(const std::string& path) { return parse_csv(io::read_file(path)); }

std::vector<double> parse_values(const std::string& text, const std::string& source) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    if (!line.empty()) {
      char* stop = nullptr;
      const double v = std::strtod(line.c_str(), &stop);
      if (stop == line.c_str() || *stop != '\0' || !std::isfinite(v)) {
        throw FormatError((source.empty() ? "" : source + ": ") + "not a finite number: '" + line + "'", pos);
      }
      out.push_back(v);
    }
    pos = end + 1;
  }
  return out;
}

std::vector<double> read_values(const std::string& path) { return parse_values(io::read_file(path), path); }

void write_values(const std::string& path, std::span<const double> values) {
  std::string out;
  char buf[64];
  for (double v : values) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out += buf;
  }
  io::write_file(path, out);
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw PreconditionError("quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("quantile: p outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return frac == 0.0 ? values[lo] : values[lo] + frac * (values[lo + 1] - values[lo]);
}

}  // namespace avqa::harness
