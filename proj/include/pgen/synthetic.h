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

// Procedural talking-head stand-in with exact ground-truth motion.

#ifndef PGEN_SYNTHETIC_H_
#define PGEN_SYNTHETIC_H_

#include <cstdint>

#include "pgen/keypoints.h"
#include "pgen/media.h"

namespace pgen {

// SplitMix64; the recurrence is fixed so sequences are reproducible anywhere.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  uint64_t state_;
};

struct SyntheticSpec {
  int width = 256;
  int height = 256;
  int frame_count = 250;
  int fps = 25;
  int keypoint_count = 10;
  uint64_t seed = 0;
  double motion_amplitude = 10.0;  // max keypoint displacement, pixels
  double kernel_bandwidth = 24.0;  // tau of the generating motion kernel, pixels
};

struct SyntheticSequence {
  VideoSequence video;
  KeypointTrack track;  // exact keypoints used to generate every frame
};

// Frame 0 is a gradient background with a textured ellipse; frame l is frame 0
// warped by dense_motion_from_keypoints(track[0], track[l], kernel_bandwidth).
SyntheticSequence generate_synthetic_sequence(const SyntheticSpec& spec);

}  // namespace pgen

#endif  // PGEN_SYNTHETIC_H_
