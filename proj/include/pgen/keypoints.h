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

#ifndef PGEN_KEYPOINTS_H_
#define PGEN_KEYPOINTS_H_

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "pgen/media.h"

namespace pgen {

// Normalized image position; (0,0) is the top-left pixel center and (1,1)
// the bottom-right one.
struct Keypoint {
  double x = 0;
  double y = 0;
  bool operator==(const Keypoint&) const = default;
};

struct KeypointSet {
  std::vector<Keypoint> points;

  size_t size() const { return points.size(); }
  bool operator==(const KeypointSet&) const = default;
};

// One KeypointSet per frame; frames[0] describes the key-reference frame.
struct KeypointTrack {
  std::vector<KeypointSet> frames;

  size_t keypoint_count() const {
    return frames.empty() ? 0 : frames.front().size();
  }
  bool operator==(const KeypointTrack&) const = default;
};

// Weight given to the "no keypoint" background hypothesis.
inline const double kDefaultBackgroundWeight = std::exp(-2.0);

// Gaussian-weighted backward field that maps each pixel of the current frame
// to the reference frame:
//   d(p) = sum_n w_n(p) (P_ref,n - P_cur,n),
//   w_n(p) = g_n(p) / (w_bg + sum_m g_m(p)),  g_n = exp(-|p - P_cur,n|^2 / 2 tau^2)
MotionField dense_motion_from_keypoints(
    const KeypointSet& reference, const KeypointSet& current, double tau,
    int width, int height, double background_weight = kDefaultBackgroundWeight);

// Sidecar track file: "PGKT", u32 frame_count, u32 keypoint_count, then
// frame-major (f64 x, f64 y) pairs, little-endian.
std::vector<uint8_t> write_track(const KeypointTrack& track);
KeypointTrack read_track(std::span<const uint8_t> bytes);

}  // namespace pgen

#endif  // PGEN_KEYPOINTS_H_
