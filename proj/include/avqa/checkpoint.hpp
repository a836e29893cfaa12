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

#include <string>

#include "avqa/model.hpp"

// Model checkpoints.
//
//   "AVQACKPT"          8-byte magic
//   u32 version         currently 1
//   u64 seed
//   str config          ModelConfig::to_text() (u32 length + bytes)
//   str meta            free-form "key=value" lines (preset, epoch, ...)
//   u64 param_count
//   param_count x { str name, u32 rank, u64 dims[rank], f64 values[prod(dims)] }
//
// Little-endian throughout; values round-trip bit-exactly.
namespace avqa::model {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  AvqaModel model;
  std::string meta;
};

std::string encode_checkpoint(AvqaModel& model, const std::string& meta = {});
Checkpoint decode_checkpoint(std::string bytes);

void save_checkpoint(const std::string& path, AvqaModel& model, const std::string& meta = {});
Checkpoint load_checkpoint(const std::string& path);

}  // namespace avqa::model
