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

#include "avqa/model.hpp"

// Dataset record files.
//
//   "AVQADSET"            8-byte magic
//   u32 version           currently 1
//   u64 record_count
//   record_count x {
//     u64 T, C, H, W, d, K
//     f64[T*C*H*W]  visual features, row-major [t][c][h][w]
//     f64[d]        audio embedding
//     f64[T*K]      artifact probabilities, row-major [t][k]
//     f64 raw_score, f64 cue_min, f64 cue_max
//     f64 mos
//   }
//
// All integers and floats are little-endian; floats are IEEE-754 binary64, so
// a write/read round trip is bit-exact.
namespace avqa::synth {

inline constexpr std::uint32_t kDatasetVersion = 1;

std::string encode_dataset(std::span<const model::ClipSample> clips);
std::vector<model::ClipSample> decode_dataset(std::string bytes);

void write_dataset(const std::string& path, std::span<const model::ClipSample> clips);
std::vector<model::ClipSample> read_dataset(const std::string& path);

}  // namespace avqa::synth
