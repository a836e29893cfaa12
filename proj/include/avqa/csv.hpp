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

#include <span>
#include <string>
#include <vector>

namespace avqa::harness {

// printf("%.6g"); the single float format of every CSV the tools write.
std::string fmt(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Plain comma-separated table (no quoting); the first row is the header.
using CsvTable = std::vector<std::vector<std::string>>;
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

// One number per line; blank lines are skipped. A malformed line is a
// FormatError carrying its byte offset.
std::vector<double> parse_values(const std::string& text, const std::string& source = {});
std::vector<double> read_values(const std::string& path);
void write_values(const std::string& path, std::span<const double> values);  // %.17g

// Linear interpolation between order statistics at h = (n - 1) p.
double quantile(std::vector<double> values, double p);

}  // namespace avqa::harness
