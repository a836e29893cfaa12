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

#include "avqa/dataset_io.hpp"

#include "avqa/binary_io.hpp"
#include "avqa/error.hpp"

namespace avqa::synth {

namespace {
constexpr std::string_view kMagic = "AVQADSET";
// Sanity bound on any single extent read from a record header.
constexpr std::uint64_t kMaxExtent = 1u << 20;
}  // namespace

std::string encode_dataset(std::span<const model::ClipSample> clips) {
  io::ByteWriter w;
  w.bytes(kMagic);
  w.u32(kDatasetVersion);
  w.u64(clips.size());
  for (const model::ClipSample& c : clips) {
    if (c.visual.rank() != 4) throw DimensionError("dataset record: visual features must be rank 4");
    w.u64(c.visual.shape[0]);
    w.u64(c.visual.shape[1]);
    w.u64(c.visual.shape[2]);
    w.u64(c.visual.shape[3]);
    w.u64(c.audio.size());
    w.u64(c.artifacts.types);
    if (c.artifacts.frames != c.visual.shape[0] || c.artifacts.probs.size() != c.artifacts.frames * c.artifacts.types) {
      throw DimensionError("dataset record: artifact matrix does not match the frame count");
    }
    w.f64s(c.visual.values);
    w.f64s(c.audio);
    w.f64s(c.artifacts.probs);
    w.f64(c.audio_cue.raw_score);
    w.f64(c.audio_cue.cue_min);
    w.f64(c.audio_cue.cue_max);
    w.f64(c.mos);
  }
  return w.data();
}

std::vector<model::ClipSample> decode_dataset(std::string bytes) {
  io::ByteReader r(std::move(bytes));
  r.expect(kMagic, "dataset file");
  const std::uint64_t version_at = r.offset();
  const std::uint32_t version = r.u32();
  if (version != kDatasetVersion) {
    throw FormatError("unsupported dataset version " + std::to_string(version), version_at);
  }
  const std::uint64_t count = r.u64();
  std::vector<model::ClipSample> clips;
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t dims[6];
    for (std::uint64_t& d : dims) {
      d = r.u64();
      if (d == 0 || d > kMaxExtent) r.fail("record " + std::to_string(i) + ": invalid extent " + std::to_string(d));
    }
    const auto [t, c, h, wd, ad, k] = dims;
    if (t * c > kMaxExtent * 64 || t * c * h * wd > (1ull << 40)) {
      r.fail("record " + std::to_string(i) + ": visual tensor too large");
    }
    model::ClipSample s;
    s.visual = numerics::Tensor({t, c, h, wd}, r.f64s(t * c * h * wd));
    s.audio = r.f64s(ad);
    s.artifacts.frames = t;
    s.artifacts.types = k;
    s.artifacts.probs = r.f64s(t * k);
    s.audio_cue.raw_score = r.f64();
    s.audio_cue.cue_min = r.f64();
    s.audio_cue.cue_max = r.f64();
    s.mos = r.f64();
    clips.push_back(std::move(s));
  }
  if (!r.at_end()) r.fail("trailing bytes after " + std::to_string(count) + " records");
  return clips;
}

void write_dataset(const std::string& path, std::span<const model::ClipSample> clips) {
  io::write_file(path, encode_dataset(clips));
}

std::vector<model::ClipSample> read_dataset(const std::string& path) { return decode_dataset(io::read_file(path)); }

}  // namespace avqa::synth
