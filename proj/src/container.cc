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

#include "pgen/container.h"

#include <cmath>
#include <sstream>

#include "pgen/byte_io.h"
#include "pgen/errors.h"

namespace pgen {

namespace {

constexpr uint32_t kMaxDimension = 1u << 15;

void put_length(ByteWriter& w, size_t n, const char* what) {
  if (n > 0xFFFFFFFFu) throw InvalidArgument(std::string(what) + " exceeds 4 GiB");
  w.u32(static_cast<uint32_t>(n));
}

bool positive_finite(double v) { return v > 0 && std::isfinite(v); }

void validate_header(const SequenceHeader& h) {
  if (h.version != kStreamVersion) {
    throw FormatError("unsupported stream version " + std::to_string(h.version));
  }
  if (h.width == 0 || h.height == 0 || h.width > kMaxDimension ||
      h.height > kMaxDimension) {
    throw FormatError("header: frame dimensions out of range");
  }
  if (h.frame_count < 2) throw FormatError("header: frame_count must be >= 2");
  if (h.fps == 0) throw FormatError("header: fps must be > 0");
  if (h.key_qp > 63) throw FormatError("header: key-frame qp out of range");
  if (!positive_finite(h.qstep)) throw FormatError("header: invalid qstep");
  if (!positive_finite(h.tau)) throw FormatError("header: invalid tau");
  if (!(h.background_weight >= 0) || !std::isfinite(h.background_weight)) {
    throw FormatError("header: invalid background weight");
  }
  if (h.level_mask & ~kAllLevels) throw FormatError("header: unknown granularity bits");
  for (int l = 0; l < kLevelCount; ++l) {
    if (((h.level_mask >> l) & 1) && !positive_finite(h.q_f[l])) {
      throw FormatError("header: invalid feature quantizer gain");
    }
  }
  if (h.block == 0 || h.block > kMaxDimension || h.search > kMaxDimension) {
    throw FormatError("header: invalid block/search parameters");
  }
}

}  // namespace

std::vector<uint8_t> write_stream(const LayeredStream& s) {
  const SequenceHeader& h = s.header;
  ByteWriter w;
  w.tag("PGEN");
  w.u32(h.version);
  w.u32(h.width);
  w.u32(h.height);
  w.u32(h.frame_count);
  w.u32(h.fps);
  put_length(w, h.key_indices.size(), "keypoint count");
  w.u32(h.key_qp);
  w.f64(h.qstep);
  w.f64(h.tau);
  w.f64(h.background_weight);
  w.u32(h.level_mask);
  for (double q : h.q_f) w.f64(q);
  w.u32(h.block);
  w.u32(h.search);
  for (const KeypointIndex& k : h.key_indices) {
    w.i32(k.x);
    w.i32(k.y);
  }
  put_length(w, s.key_payload.size(), "key payload");
  w.bytes(s.key_payload);

  if (s.records.size() + 1 != h.frame_count) {
    throw InvalidArgument("write_stream: record count does not match frame_count");
  }
  for (const FrameRecord& r : s.records) {
    w.u32(r.frame_index);
    put_length(w, r.base.size(), "base payload");
    w.bytes(r.base);
    int last = -1;
    uint32_t mask = 0;
    for (const EnhancementPayload& e : r.enhancements) {
      if (e.level <= last || e.level >= kLevelCount) {
        throw InvalidArgument("write_stream: enhancement levels must ascend");
      }
      last = e.level;
      mask |= 1u << e.level;
      w.u8(e.level);
      put_length(w, e.payload.bytes.size(), "enhancement payload");
      w.u16(e.payload.checksum);
      w.bytes(e.payload.bytes);
    }
    if (mask != h.level_mask) {
      throw InvalidArgument("write_stream: record levels disagree with header mask");
    }
  }
  return w.take();
}

LayeredStream read_stream(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  if (!r.tag("PGEN")) throw FormatError("not a .pgen stream (bad magic)");
  LayeredStream s;
  SequenceHeader& h = s.header;
  h.version = r.u32("version");
  if (h.version != kStreamVersion) {
    throw FormatError("unsupported stream version " + std::to_string(h.version));
  }
  h.width = r.u32("width");
  h.height = r.u32("height");
  h.frame_count = r.u32("frame_count");
  h.fps = r.u32("fps");
  const uint32_t n = r.u32("keypoint_count");
  h.key_qp = r.u32("key_qp");
  h.qstep = r.f64("qstep");
  h.tau = r.f64("tau");
  h.background_weight = r.f64("background_weight");
  h.level_mask = r.u32("level_mask");
  for (double& q : h.q_f) q = r.f64("q_f");
  h.block = r.u32("block");
  h.search = r.u32("search");
  validate_header(h);
  if (r.remaining() / 8 < n) throw FormatError("truncated input while reading key keypoints");
  h.key_indices.resize(n);
  for (KeypointIndex& k : h.key_indices) {
    k.x = r.i32("key keypoint x");
    k.y = r.i32("key keypoint y");
  }
  const uint32_t key_len = r.u32("key payload length");
  const auto key = r.bytes(key_len, "key payload");
  s.key_payload.assign(key.begin(), key.end());

  for (uint32_t l = 1; l < h.frame_count; ++l) {
    const std::string where = "frame record " + std::to_string(l) + ": ";
    try {
      FrameRecord rec;
      rec.frame_index = r.u32("frame index");
      if (rec.frame_index != l) {
        throw FormatError("frame index " + std::to_string(rec.frame_index) +
                          " out of sequence");
      }
      const uint32_t base_len = r.u32("base payload length");
      const auto base = r.bytes(base_len, "base payload");
      rec.base.assign(base.begin(), base.end());
      for (int level = 0; level < kLevelCount; ++level) {
        if (!((h.level_mask >> level) & 1)) continue;
        EnhancementPayload e;
        e.level = r.u8("level id");
        if (e.level != level) {
          throw FormatError("expected level " + std::to_string(level) + ", found " +
                            std::to_string(e.level));
        }
        const uint32_t len = r.u32("enhancement payload length");
        e.payload.checksum = r.u16("base feature checksum");
        const auto body = r.bytes(len, "enhancement payload");
        e.payload.bytes.assign(body.begin(), body.end());
        rec.enhancements.push_back(std::move(e));
      }
      s.records.push_back(std::move(rec));
    } catch (const FormatError& e) {
      throw FormatError(where + e.what());
    }
  }
  if (r.remaining() != 0) {
    throw FormatError(std::to_string(r.remaining()) + " trailing bytes after last record");
  }
  return s;
}

std::string to_string(const LayerSet& set) {
  std::string out = "base";
  for (const GranularityLevel& l : kGranularityLevels) {
    if (set.has(l.id)) out += "+" + std::to_string(l.side);
  }
  return out;
}

LayerSet parse_layer_set(const std::string& text) {
  if (text == "all") return LayerSet::all();
  LayerSet set;
  std::string token;
  std::stringstream in(text);
  bool any = false;
  auto take = [&](const std::string& tok) {
    if (tok.empty()) throw InvalidArgument("empty entry in layer set '" + text + "'");
    any = true;
    if (tok == "base") return;
    int side = 0;
    try {
      size_t used = 0;
      side = std::stoi(tok, &used);
      if (used != tok.size()) side = 0;
    } catch (const std::exception&) {
      side = 0;
    }
    if (!is_supported_side(side)) {
      throw InvalidArgument("unknown layer '" + tok + "' (expected base, 8, 16 or 32)");
    }
    set.level_mask |= 1u << level_for_side(side);
  };
  for (char c : text) {
    if (c == ',' || c == '+') {
      take(token);
      token.clear();
    } else {
      token += c;
    }
  }
  take(token);
  if (!any) throw InvalidArgument("empty layer set");
  return set;
}

std::vector<uint8_t> extract_substream(std::span<const uint8_t> bytes,
                                       const LayerSet& keep) {
  LayeredStream s = read_stream(bytes);
  if (!keep.subset_of(LayerSet{s.header.level_mask})) {
    throw InvalidArgument("requested layers " + to_string(keep) +
                          " not present in stream (" +
                          to_string(LayerSet{s.header.level_mask}) + ")");
  }
  s.header.level_mask = keep.level_mask;
  for (FrameRecord& r : s.records) {
    std::erase_if(r.enhancements,
                  [&](const EnhancementPayload& e) { return !keep.has(e.level); });
  }
  return write_stream(s);
}

LayerSelection select_layers(const RateTable& rates, double budget_kbps) {
  LayerSelection sel;
  if (budget_kbps < rates.base_kbps) {
    sel.fits = false;
    return sel;
  }
  for (const auto& [level, kbps] : rates.cumulative_kbps) {
    if (kbps > budget_kbps) break;
    sel.layers.level_mask |= 1u << level;
  }
  return sel;
}

}  // namespace pgen
