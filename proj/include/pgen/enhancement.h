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

// Enhancement layer: multi-granularity luminance features coded against the
// base-layer reconstruction, gain recalibration of the base frame, and
// block-matching refinement that re-warps the key frame.

#ifndef PGEN_ENHANCEMENT_H_
#define PGEN_ENHANCEMENT_H_

#include <array>
#include <cstdint>
#include <vector>

#include "pgen/media.h"

namespace pgen {

constexpr int kLevelCount = 3;

struct GranularityLevel {
  int id;
  int side;
  double lambda;  // rate-distortion weight, informational only
};

constexpr std::array<GranularityLevel, kLevelCount> kGranularityLevels = {{
    {0, 8, 64.0},
    {1, 16, 268.0},
    {2, 32, 1500.0},
}};

// Level id for a feature side; throws InvalidArgument for other sides.
int level_for_side(int side);

constexpr double kFeatureSigmaMin = 0.5;
constexpr double kFeatureSigmaSlope = 0.25;
constexpr double kGainEpsilon = 1.0;
constexpr double kGainMin = 0.5;
constexpr double kGainMax = 2.0;
constexpr int kDefaultBlock = 16;
constexpr int kDefaultSearch = 12;
constexpr double kOcclusionSadScale = 64.0;

FeatureMap extract_feature(const Frame& frame, int side);

// sigma = 0.5 + 0.25 * (mean |difference| to the 4 edge-replicated neighbors).
FeatureMap predict_sigma(const FeatureMap& base_feature);

// Fletcher-16 over the little-endian int16 values round(16 * v).
uint16_t feature_checksum(const FeatureMap& feature);

struct FeaturePayload {
  uint16_t checksum = 0;  // of the base feature the symbols were coded against
  std::vector<uint8_t> bytes;
  bool operator==(const FeaturePayload&) const = default;
};

// Symbols q = round((S - base) * q_f) in raster order, each coded with a
// Gaussian whose mean is the average of the decoded left/top symbols and whose
// sigma comes from predict_sigma(base_feature).
FeaturePayload encode_feature(const FeatureMap& feature,
                              const FeatureMap& base_feature, double q_f);

// clamp(base + q / q_f, 0, 255). Throws ProtocolError if base_feature differs
// from the one the encoder used.
FeatureMap decode_feature(const FeaturePayload& payload,
                          const FeatureMap& base_feature, double q_f);

// Multiplies every channel by the upsampled gain (S_hat + 1) / (F + 1),
// F = extract_feature(base_frame), gain clamped to [0.5, 2].
Frame recalibrate(const Frame& base_frame, const FeatureMap& s_hat);

struct BlockVector {
  int dx = 0;
  int dy = 0;
  double sad_per_pixel = 0;
  bool operator==(const BlockVector&) const = default;
};

struct RefinedMotion {
  int block = kDefaultBlock;
  std::vector<BlockVector> blocks;  // row-major over the block grid
  MotionField field;                // block vectors, bilinearly upsampled
  OcclusionMap occlusion;           // 1 - SAD per pixel / 64 per block, clamped
};

// Full search of every `coarse` block in `key_recon` within +-search pixels
// (candidates fully inside the frame). Luminance SAD; ties go to the smallest
// |dx| + |dy|, then dy, then dx.
RefinedMotion refine_motion(const Frame& key_recon, const Frame& coarse,
                            int block = kDefaultBlock, int search = kDefaultSearch);

// occ * warp_bilinear(key_recon, field) + (1 - occ) * coarse.
Frame compose_fine(const Frame& key_recon, const Frame& coarse,
                   const MotionField& field, const OcclusionMap& occlusion);

}  // namespace pgen

#endif  // PGEN_ENHANCEMENT_H_
