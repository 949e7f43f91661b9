// Copyright 2026 The PGen Authors. All Rights Reserved.
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

// Layered .pgen bitstream: sequence header, key-frame payload, and one record
// per inter frame holding the base payload plus optional enhancement payloads.
//
// Layout (little-endian, u32 lengths):
//   "PGEN" u32 version
//   u32 width, height, frame_count, fps, keypoint_count, key_qp
//   f64 qstep, tau, background_weight
//   u32 level_mask  f64 q_f[3]  u32 block, search
//   keypoint_count x (i32 x, i32 y)      key-frame keypoint indices
//   u32 key_len, key payload
//   per inter frame: u32 frame_index, u32 base_len, base payload,
//     per present level (ascending): u8 level, u32 len, u16 checksum, payload

#ifndef PGEN_CONTAINER_H_
#define PGEN_CONTAINER_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pgen/base_layer.h"
#include "pgen/enhancement.h"

namespace pgen {

constexpr uint32_t kStreamVersion = 1;
constexpr uint32_t kAllLevels = (1u << kLevelCount) - 1;
// Level id, length, and checksum fields around each enhancement payload.
constexpr size_t kEnhancementOverhead = 1 + 4 + 2;

struct SequenceHeader {
  uint32_t version = kStreamVersion;
  uint32_t width = 0;
  uint32_t height = 0;
  uint32_t frame_count = 0;
  uint32_t fps = 0;
  uint32_t key_qp = 0;
  double qstep = kDefaultQstep;
  double tau = kDefaultTau;
  double background_weight = kDefaultBackgroundWeight;
  uint32_t level_mask = 0;  // bit i set <=> granularity level i present
  std::array<double, kLevelCount> q_f = {1.0, 1.0, 1.0};
  uint32_t block = kDefaultBlock;
  uint32_t search = kDefaultSearch;
  std::vector<KeypointIndex> key_indices;

  bool operator==(const SequenceHeader&) const = default;
};

struct EnhancementPayload {
  uint8_t level = 0;
  FeaturePayload payload;
  bool operator==(const EnhancementPayload&) const = default;
};

struct FrameRecord {
  uint32_t frame_index = 0;
  std::vector<uint8_t> base;
  std::vector<EnhancementPayload> enhancements;  // ascending level ids
  bool operator==(const FrameRecord&) const = default;
};

struct LayeredStream {
  SequenceHeader header;
  std::vector<uint8_t> key_payload;
  std::vector<FrameRecord> records;  // frames 1..frame_count-1
  bool operator==(const LayeredStream&) const = default;
};

std::vector<uint8_t> write_stream(const LayeredStream& stream);
// Throws FormatError naming the failing field or record.
LayeredStream read_stream(std::span<const uint8_t> bytes);

// The base layer plus a subset of granularity levels.
struct LayerSet {
  uint32_t level_mask = 0;

  static LayerSet base_only() { return {0}; }
  static LayerSet all() { return {kAllLevels}; }
  bool has(int level) const { return (level_mask >> level) & 1; }
  bool subset_of(const LayerSet& other) const {
    return (level_mask & ~other.level_mask) == 0;
  }
  bool operator==(const LayerSet&) const = default;
};

// "base", "base+8+16", ...
std::string to_string(const LayerSet& set);
// Accepts "all", "base", or sides separated by ',' or '+', optionally
// including "base": "8,16", "base+8+16+32".
LayerSet parse_layer_set(const std::string& text);

// Drops enhancement payloads outside `keep` and rewrites the level mask.
// Throws InvalidArgument if `keep` names a level the stream lacks.
std::vector<uint8_t> extract_substream(std::span<const uint8_t> bytes,
                                       const LayerSet& keep);

struct RateTable {
  double base_kbps = 0;
  // Cumulative rate after adding each present level, ascending level order.
  std::vector<std::pair<int, double>> cumulative_kbps;
};

struct LayerSelection {
  LayerSet layers;
  bool fits = true;  // false when even the base layer exceeds the budget
};

// Base plus the longest level prefix whose cumulative rate fits the budget.
LayerSelection select_layers(const RateTable& rates, double budget_kbps);

}  // namespace pgen

#endif  // PGEN_CONTAINER_H_
