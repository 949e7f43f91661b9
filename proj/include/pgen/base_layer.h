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

// Base layer: keypoint analysis, closed-loop parameter coding, and
// keypoint-driven synthesis of inter frames from the decoded key frame.

#ifndef PGEN_BASE_LAYER_H_
#define PGEN_BASE_LAYER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pgen/keypoints.h"
#include "pgen/media.h"

namespace pgen {

constexpr double kDefaultQstep = 1.0 / 256.0;
constexpr double kDefaultTau = 24.0;

// Oracle analysis: returns the ground-truth keypoints of frame_index.
KeypointSet analyze(int frame_index, const KeypointTrack& oracle);

// Quantizer indices of one keypoint: round(x / qstep), round(y / qstep).
struct KeypointIndex {
  int32_t x = 0;
  int32_t y = 0;
  bool operator==(const KeypointIndex&) const = default;
};

std::vector<KeypointIndex> quantize_keypoints(const KeypointSet& set, double qstep);
KeypointSet dequantize_keypoints(std::span<const KeypointIndex> indices, double qstep);

struct ParamStream {
  std::vector<KeypointIndex> key_indices;  // frame 0, carried in the header
  // One range-coded stream for frames 1..n-1. frame_ends[l - 1] is the byte
  // offset where frame l's share ends; the last share holds the flush bytes.
  std::vector<uint8_t> bytes;
  std::vector<size_t> frame_ends;
  KeypointTrack reconstruction;  // what the decoder will reproduce
};

// Frame 1 is predicted from the key-frame indices, frame l > 1 from the
// decoded indices of frame l - 1. Residuals are zigzag-mapped and coded with
// contexts (axis, magnitude class of the previous residual of that keypoint).
ParamStream encode_params(const KeypointTrack& track, double qstep);

KeypointTrack decode_params(std::span<const uint8_t> bytes,
                            std::span<const KeypointIndex> key_indices,
                            int frame_count, double qstep);

// warp_bilinear(key_recon, dense_motion_from_keypoints(kp_key, kp_cur, tau)).
Frame synthesize_base(const Frame& key_recon, const KeypointSet& kp_key,
                      const KeypointSet& kp_cur, double tau,
                      double background_weight = kDefaultBackgroundWeight);

}  // namespace pgen

#endif  // PGEN_BASE_LAYER_H_
