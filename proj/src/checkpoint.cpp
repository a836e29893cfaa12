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

#include "avqa/checkpoint.hpp"

#include "avqa/binary_io.hpp"
#include "avqa/error.hpp"

namespace avqa::model {

namespace {
constexpr std::string_view kMagic = "AVQACKPT";
}

std::string encode_checkpoint(AvqaModel& model, const std::string& meta) {
  io::ByteWriter w;
  w.bytes(kMagic);
  w.u32(kCheckpointVersion);
  w.u64(model.config().seed);
  w.str(model.config().to_text());
  w.str(meta);
  const auto params = model.parameters();
  w.u64(params.size());
  for (const Parameter* p : params) {
    w.str(p->name);
    w.u32(static_cast<std::uint32_t>(p->tensor.shape.size()));
    for (std::size_t d : p->tensor.shape) w.u64(d);
    w.f64s(p->tensor.values);
  }
  return w.data();
}

Checkpoint decode_checkpoint(std::string bytes) {
  io::ByteReader r(std::move(bytes));
  r.expect(kMagic, "checkpoint");
  const std::uint64_t version_at = r.offset();
  if (const std::uint32_t v = r.u32(); v != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(v), version_at);
  }
  const std::uint64_t seed = r.u64();
  const std::uint64_t config_at = r.offset();
  ModelConfig cfg;
  try {
    cfg = ModelConfig::parse(r.str());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint config: ") + e.what(), config_at);
  }
  if (cfg.seed != seed) r.fail("checkpoint seed does not match its config");
  std::string meta = r.str();

  Checkpoint ck{AvqaModel(cfg), std::move(meta)};
  auto params = ck.model.parameters();
  const std::uint64_t count = r.u64();
  if (count != params.size()) {
    r.fail("checkpoint holds " + std::to_string(count) + " parameters, model expects " + std::to_string(params.size()));
  }
  for (Parameter* p : params) {
    const std::string name = r.str();
    if (name != p->name) r.fail("expected parameter '" + p->name + "', found '" + name + "'");
    const std::uint32_t rank = r.u32();
    numerics::Shape shape(rank);
    for (std::size_t& d : shape) d = r.u64();
    if (shape != p->tensor.shape) {
      r.fail("parameter '" + name + "' has shape " + numerics::shape_string(shape) + ", expected " +
             numerics::shape_string(p->tensor.shape));
    }
    p->tensor.values = r.f64s(p->tensor.size());
  }
  if (!r.at_end()) r.fail("trailing bytes after checkpoint parameters");
  return ck;
}

void save_checkpoint(const std::string& path, AvqaModel& model, const std::string& meta) {
  io::write_file(path, encode_checkpoint(model, meta));
}

Checkpoint load_checkpoint(const std::string& path) { return decode_checkpoint(io::read_file(path)); }

}  // namespace avqa::model
