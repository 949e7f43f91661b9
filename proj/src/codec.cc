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

#include "pgen/codec.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "pgen/base_layer.h"
#include "pgen/enhancement.h"
#include "pgen/errors.h"

namespace pgen {

namespace {

// Fixed header fields (magic through search) plus the key payload length.
constexpr size_t kFixedHeaderBytes = 4 + 4 + 6 * 4 + 3 * 8 + 4 + kLevelCount * 8 + 2 * 4 + 4;
constexpr size_t kRecordOverheadBytes = 4 + 4;

template <typename E>
[[noreturn]] void rethrow_in_record(const E& e, int l) {
  throw E("frame record " + std::to_string(l) + ": " + e.what());
}

}  // namespace

void validate(const CodecConfig& c) {
  if (!is_qp_in_set(c.key_qp)) {
    throw InvalidArgument("key-frame qp " + std::to_string(c.key_qp) +
                          " not in {2,12,22,32,42,52}");
  }
  if (!(c.qstep > 0) || !std::isfinite(c.qstep)) throw InvalidArgument("qstep must be > 0");
  if (!(c.tau > 0) || !std::isfinite(c.tau)) throw InvalidArgument("tau must be > 0");
  if (!(c.background_weight >= 0) || !std::isfinite(c.background_weight)) {
    throw InvalidArgument("background weight must be >= 0");
  }
  if (c.layers.level_mask & ~kAllLevels) throw InvalidArgument("unknown granularity level");
  for (int l = 0; l < kLevelCount; ++l) {
    if (c.layers.has(l) && (!(c.q_f[l] > 0) || !std::isfinite(c.q_f[l]))) {
      throw InvalidArgument("feature quantizer gain must be > 0");
    }
  }
  if (c.block <= 0) throw InvalidArgument("block size must be > 0");
  if (c.search < 0) throw InvalidArgument("search range must be >= 0");
}

size_t LayerRates::bytes_for(const LayerSet& layers) const {
  size_t total = base_bytes();
  for (int l = 0; l < kLevelCount; ++l) {
    if (layers.has(l)) total += level_bytes[l];
  }
  return total;
}

double LayerRates::kbps_for(const LayerSet& layers) const {
  return static_cast<double>(bytes_for(layers)) * 8.0 * fps / frame_count / 1000.0;
}

RateTable LayerRates::rate_table(const LayerSet& present) const {
  RateTable t;
  t.base_kbps = kbps_for(LayerSet::base_only());
  LayerSet acc;
  for (int l = 0; l < kLevelCount; ++l) {
    if (!present.has(l)) continue;
    acc.level_mask |= 1u << l;
    t.cumulative_kbps.emplace_back(l, kbps_for(acc));
  }
  return t;
}

LayerRates measure_rates(const LayeredStream& s) {
  LayerRates r;
  r.header_bytes = kFixedHeaderBytes + 8 * s.header.key_indices.size();
  r.key_bytes = s.key_payload.size();
  r.frame_count = static_cast<int>(s.header.frame_count);
  r.fps = static_cast<int>(s.header.fps);
  for (const FrameRecord& rec : s.records) {
    r.record_overhead_bytes += kRecordOverheadBytes;
    r.param_bytes += rec.base.size();
    for (const EnhancementPayload& e : rec.enhancements) {
      r.level_bytes[e.level] += e.payload.bytes.size() + kEnhancementOverhead;
    }
  }
  return r;
}

EncodeResult encode_sequence(const VideoSequence& video, const KeypointTrack& track,
                             const CodecConfig& config) {
  validate(config);
  const int n = static_cast<int>(video.frames.size());
  if (n < 2) throw InvalidArgument("encode: need a key frame and at least one inter frame");
  const int w = video.width();
  const int h = video.height();
  for (const Frame& f : video.frames) {
    if (f.width != w || f.height != h || !f.valid()) {
      throw InvalidArgument("encode: inconsistent frame dimensions");
    }
  }
  if (video.fps <= 0) throw InvalidArgument("encode: fps must be > 0");
  if (track.frames.size() != video.frames.size()) {
    throw InvalidArgument("encode: keypoint track has " + std::to_string(track.frames.size()) +
                          " frames, video has " + std::to_string(n));
  }
  if (config.layers.level_mask != 0) {
    if (w % config.block != 0 || h % config.block != 0) {
      throw InvalidArgument("encode: frame size is not a multiple of the block size");
    }
    for (int l = 0; l < kLevelCount; ++l) {
      if (config.layers.has(l) && kGranularityLevels[l].side > std::min(w, h)) {
        throw InvalidArgument("encode: granularity larger than the frame");
      }
    }
  }

  EncodeResult out;
  IntraResult key = encode_key_frame(video.frames[0], config.key_qp);
  out.key_reconstruction = std::move(key.reconstruction);

  KeypointTrack analyzed;
  for (int l = 0; l < n; ++l) analyzed.frames.push_back(analyze(l, track));
  ParamStream params = encode_params(analyzed, config.qstep);
  out.param_reconstruction = params.reconstruction;

  LayeredStream& s = out.stream;
  SequenceHeader& hd = s.header;
  hd.width = static_cast<uint32_t>(w);
  hd.height = static_cast<uint32_t>(h);
  hd.frame_count = static_cast<uint32_t>(n);
  hd.fps = static_cast<uint32_t>(video.fps);
  hd.key_qp = static_cast<uint32_t>(config.key_qp);
  hd.qstep = config.qstep;
  hd.tau = config.tau;
  hd.background_weight = config.background_weight;
  hd.level_mask = config.layers.level_mask;
  hd.q_f = config.q_f;
  hd.block = static_cast<uint32_t>(config.block);
  hd.search = static_cast<uint32_t>(config.search);
  hd.key_indices = params.key_indices;
  s.key_payload = std::move(key.bytes);

  const KeypointSet& kp_key = params.reconstruction.frames[0];
  size_t begin = 0;
  for (int l = 1; l < n; ++l) {
    FrameRecord rec;
    rec.frame_index = static_cast<uint32_t>(l);
    const size_t end = params.frame_ends[l - 1];
    rec.base.assign(params.bytes.begin() + begin, params.bytes.begin() + end);
    begin = end;
    if (config.layers.level_mask != 0) {
      const Frame base = synthesize_base(out.key_reconstruction, kp_key,
                                         params.reconstruction.frames[l], config.tau,
                                         config.background_weight);
      for (const GranularityLevel& g : kGranularityLevels) {
        if (!config.layers.has(g.id)) continue;
        rec.enhancements.push_back(
            {static_cast<uint8_t>(g.id),
             encode_feature(extract_feature(video.frames[l], g.side),
                            extract_feature(base, g.side), config.q_f[g.id])});
      }
    }
    s.records.push_back(std::move(rec));
  }

  out.layers = config.layers;
  if (config.budget_kbps) {
    const LayerSelection sel =
        select_layers(measure_rates(s).rate_table(config.layers), *config.budget_kbps);
    out.layers = sel.layers;
    out.budget_fits = sel.fits;
    hd.level_mask = sel.layers.level_mask;
    for (FrameRecord& rec : s.records) {
      std::erase_if(rec.enhancements,
                    [&](const EnhancementPayload& e) { return !sel.layers.has(e.level); });
    }
  }
  out.rates = measure_rates(s);
  out.bytes = write_stream(s);
  return out;
}

DecodedSequence decode_stream(std::span<const uint8_t> bytes, std::optional<LayerSet> layers,
                              bool keep_stages) {
  const LayeredStream s = read_stream(bytes);
  const SequenceHeader& h = s.header;
  const LayerSet present{h.level_mask};
  const LayerSet use = layers.value_or(present);
  if (!use.subset_of(present)) {
    throw InvalidArgument("requested layers " + to_string(use) + " not present in stream (" +
                          to_string(present) + ")");
  }
  const int w = static_cast<int>(h.width);
  const int ht = static_cast<int>(h.height);
  const int n = static_cast<int>(h.frame_count);

  DecodedSequence out;
  out.video.fps = static_cast<int>(h.fps);
  Frame key;
  try {
    key = decode_key_frame(s.key_payload, w, ht, static_cast<int>(h.key_qp));
  } catch (const DecodeError& e) {
    throw DecodeError(std::string("key frame: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("key frame: ") + e.what());
  }

  std::vector<uint8_t> params;
  for (const FrameRecord& r : s.records) params.insert(params.end(), r.base.begin(), r.base.end());
  try {
    out.track = decode_params(params, h.key_indices, n, h.qstep);
  } catch (const DecodeError& e) {
    throw DecodeError(std::string("base layer parameters: ") + e.what());
  }

  if (use.level_mask != 0 && (w % static_cast<int>(h.block) != 0 ||
                              ht % static_cast<int>(h.block) != 0)) {
    throw FormatError("header: frame size is not a multiple of the block size");
  }

  out.video.frames.reserve(n);
  out.video.frames.push_back(key);
  const KeypointSet& kp_key = out.track.frames[0];
  for (int l = 1; l < n; ++l) {
    const FrameRecord& rec = s.records[l - 1];
    try {
      Frame base = synthesize_base(key, kp_key, out.track.frames[l], h.tau, h.background_weight);
      if (use.level_mask == 0) {
        if (keep_stages) {
          out.base_frames.push_back(base);
          out.coarse_frames.push_back(base);
        }
        out.video.frames.push_back(std::move(base));
        continue;
      }
      Frame coarse = base;
      for (const EnhancementPayload& e : rec.enhancements) {
        if (!use.has(e.level)) continue;
        const int side = kGranularityLevels[e.level].side;
        const FeatureMap s_hat =
            decode_feature(e.payload, extract_feature(base, side), h.q_f[e.level]);
        coarse = recalibrate(coarse, s_hat);
      }
      const RefinedMotion m = refine_motion(key, coarse, static_cast<int>(h.block),
                                            static_cast<int>(h.search));
      Frame fine = compose_fine(key, coarse, m.field, m.occlusion);
      if (keep_stages) {
        out.base_frames.push_back(std::move(base));
        out.coarse_frames.push_back(std::move(coarse));
      }
      out.video.frames.push_back(std::move(fine));
    } catch (const ProtocolError& e) {
      rethrow_in_record(e, l);
    } catch (const DecodeError& e) {
      rethrow_in_record(e, l);
    }
  }
  return out;
}

}  // namespace pgen
