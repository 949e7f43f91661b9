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

// End-to-end encoder and decoder over the layered container.

#ifndef PGEN_CODEC_H_
#define PGEN_CODEC_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pgen/container.h"
#include "pgen/intra_codec.h"
#include "pgen/keypoints.h"
#include "pgen/media.h"

namespace pgen {

struct CodecConfig {
  int key_qp = kDefaultQp;
  double qstep = kDefaultQstep;
  double tau = kDefaultTau;
  double background_weight = kDefaultBackgroundWeight;
  LayerSet layers = LayerSet::all();
  std::array<double, kLevelCount> q_f = {1.0, 1.0, 1.0};
  int block = kDefaultBlock;
  int search = kDefaultSearch;
  std::optional<double> budget_kbps;  // if set, encode only the layers that fit
};

// Throws InvalidArgument on a QP outside kQpSet or other invalid fields.
void validate(const CodecConfig& config);

struct LayerRates {
  size_t header_bytes = 0;   // everything outside the key and frame payloads
  size_t key_bytes = 0;
  size_t param_bytes = 0;    // base payloads of all inter frames
  size_t record_overhead_bytes = 0;  // frame index + base length fields
  std::array<size_t, kLevelCount> level_bytes = {};  // payloads + 7 bytes each
  int frame_count = 0;
  int fps = 0;

  size_t base_bytes() const {
    return header_bytes + key_bytes + param_bytes + record_overhead_bytes;
  }
  // Bytes of the substream holding the base layer and `layers`.
  size_t bytes_for(const LayerSet& layers) const;
  double kbps_for(const LayerSet& layers) const;
  RateTable rate_table(const LayerSet& present) const;
};

struct EncodeResult {
  std::vector<uint8_t> bytes;
  LayeredStream stream;
  LayerRates rates;
  KeypointTrack param_reconstruction;  // encoder-side closed-loop track
  Frame key_reconstruction;
  LayerSet layers;                     // levels actually written
  bool budget_fits = true;
};

EncodeResult encode_sequence(const VideoSequence& video, const KeypointTrack& track,
                             const CodecConfig& config);

struct DecodedSequence {
  VideoSequence video;
  KeypointTrack track;
  // Filled only when requested: per inter frame (index l - 1).
  std::vector<Frame> base_frames;
  std::vector<Frame> coarse_frames;
};

// Decodes `layers` (default: every layer in the stream). Throws
// InvalidArgument if a requested layer is absent; decoding errors name the
// failing frame record.
DecodedSequence decode_stream(std::span<const uint8_t> bytes,
                              std::optional<LayerSet> layers = std::nullopt,
                              bool keep_stages = false);

LayerRates measure_rates(const LayeredStream& stream);

}  // namespace pgen

#endif  // PGEN_CODEC_H_
