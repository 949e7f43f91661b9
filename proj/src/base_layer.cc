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

#include "pgen/base_layer.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <string>

#include "pgen/entropy.h"
#include "pgen/errors.h"

namespace pgen {

namespace {

constexpr int kDirectSymbols = 31;        // zigzag values coded directly
constexpr int kEscape = kDirectSymbols;   // followed by a length + raw bits
constexpr int kResidualAlphabet = kDirectSymbols + 1;
constexpr int kLengthAlphabet = 33;
constexpr int kClasses = 4;
constexpr int64_t kIndexLimit = int64_t{1} << 30;

int magnitude_class(int64_t r) {
  const uint64_t a = static_cast<uint64_t>(r < 0 ? -r : r);
  if (a == 0) return 0;
  if (a == 1) return 1;
  if (a <= 3) return 2;
  return 3;
}

uint64_t zigzag(int64_t r) {
  return r >= 0 ? static_cast<uint64_t>(r) * 2 : static_cast<uint64_t>(-r) * 2 - 1;
}

int64_t unzigzag(uint64_t u) {
  return (u & 1) ? -static_cast<int64_t>((u + 1) / 2) : static_cast<int64_t>(u / 2);
}

struct ResidualCoder {
  AdaptiveModel residual{kResidualAlphabet, 2 * kClasses};
  AdaptiveModel length{kLengthAlphabet};

  void encode(RangeEncoder& enc, int ctx, int64_t r) {
    const uint64_t u = zigzag(r);
    if (u < kDirectSymbols) {
      residual.encode(enc, ctx, static_cast<int>(u));
      return;
    }
    residual.encode(enc, ctx, kEscape);
    const uint32_t extra = static_cast<uint32_t>(u - kDirectSymbols);
    const int nb = std::bit_width(extra);
    length.encode(enc, 0, nb);
    // The leading 1 bit is implied by the length.
    if (nb > 1) enc.encode_bits(extra & ((1u << (nb - 1)) - 1), nb - 1);
  }

  int64_t decode(RangeDecoder& dec, int ctx) {
    const int sym = residual.decode(dec, ctx);
    if (sym != kEscape) return unzigzag(static_cast<uint64_t>(sym));
    const int nb = length.decode(dec, 0);
    uint64_t extra = 0;
    if (nb > 0) {
      extra = uint64_t{1} << (nb - 1);
      if (nb > 1) extra |= dec.decode_bits(nb - 1);
    }
    return unzigzag(extra + kDirectSymbols);
  }
};

void check_qstep(double qstep) {
  if (!(qstep > 0) || !std::isfinite(qstep)) {
    throw InvalidArgument("qstep must be a positive finite number");
  }
}

}  // namespace

KeypointSet analyze(int frame_index, const KeypointTrack& oracle) {
  if (frame_index < 0 || static_cast<size_t>(frame_index) >= oracle.frames.size()) {
    throw InvalidArgument("analyze: frame " + std::to_string(frame_index) +
                          " not covered by the keypoint track");
  }
  return oracle.frames[frame_index];
}

std::vector<KeypointIndex> quantize_keypoints(const KeypointSet& set, double qstep) {
  check_qstep(qstep);
  std::vector<KeypointIndex> out;
  out.reserve(set.size());
  for (const Keypoint& p : set.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw InvalidArgument("keypoint coordinate is not finite");
    }
    const double qx = std::round(std::clamp(p.x, 0.0, 1.0) / qstep);
    const double qy = std::round(std::clamp(p.y, 0.0, 1.0) / qstep);
    if (std::abs(qx) > kIndexLimit || std::abs(qy) > kIndexLimit) {
      throw InvalidArgument("qstep too small for 32-bit keypoint indices");
    }
    out.push_back({static_cast<int32_t>(qx), static_cast<int32_t>(qy)});
  }
  return out;
}

KeypointSet dequantize_keypoints(std::span<const KeypointIndex> indices, double qstep) {
  KeypointSet set;
  set.points.reserve(indices.size());
  for (const KeypointIndex& k : indices) {
    set.points.push_back({std::clamp(k.x * qstep, 0.0, 1.0),
                          std::clamp(k.y * qstep, 0.0, 1.0)});
  }
  return set;
}

ParamStream encode_params(const KeypointTrack& track, double qstep) {
  check_qstep(qstep);
  if (track.frames.empty()) throw InvalidArgument("encode_params: empty track");
  const size_t n = track.keypoint_count();
  for (const KeypointSet& set : track.frames) {
    if (set.size() != n) {
      throw InvalidArgument("encode_params: keypoint count varies across frames");
    }
  }

  ParamStream out;
  out.key_indices = quantize_keypoints(track.frames[0], qstep);
  out.reconstruction.frames.push_back(dequantize_keypoints(out.key_indices, qstep));

  RangeEncoder enc;
  ResidualCoder coder;
  std::vector<KeypointIndex> prev = out.key_indices;
  std::vector<int> prev_class(2 * n, 0);
  for (size_t l = 1; l < track.frames.size(); ++l) {
    const std::vector<KeypointIndex> cur = quantize_keypoints(track.frames[l], qstep);
    for (size_t k = 0; k < n; ++k) {
      const int64_t rx = int64_t{cur[k].x} - prev[k].x;
      const int64_t ry = int64_t{cur[k].y} - prev[k].y;
      coder.encode(enc, prev_class[2 * k], rx);
      coder.encode(enc, kClasses + prev_class[2 * k + 1], ry);
      prev_class[2 * k] = magnitude_class(rx);
      prev_class[2 * k + 1] = magnitude_class(ry);
    }
    out.frame_ends.push_back(enc.bytes_emitted());
    out.reconstruction.frames.push_back(dequantize_keypoints(cur, qstep));
    prev = cur;
  }
  out.bytes = enc.finish();
  if (!out.frame_ends.empty()) out.frame_ends.back() = out.bytes.size();
  return out;
}

KeypointTrack decode_params(std::span<const uint8_t> bytes,
                            std::span<const KeypointIndex> key_indices,
                            int frame_count, double qstep) {
  check_qstep(qstep);
  if (frame_count < 1) throw InvalidArgument("decode_params: empty track");
  KeypointTrack track;
  track.frames.push_back(dequantize_keypoints(key_indices, qstep));
  if (frame_count == 1) {
    if (!bytes.empty()) throw DecodeError("parameter payload present for a single frame");
    return track;
  }

  const size_t n = key_indices.size();
  RangeDecoder dec(bytes);
  ResidualCoder coder;
  std::vector<KeypointIndex> prev(key_indices.begin(), key_indices.end());
  std::vector<int> prev_class(2 * n, 0);
  for (int l = 1; l < frame_count; ++l) {
    std::vector<KeypointIndex> cur(n);
    for (size_t k = 0; k < n; ++k) {
      const int64_t rx = coder.decode(dec, prev_class[2 * k]);
      const int64_t ry = coder.decode(dec, kClasses + prev_class[2 * k + 1]);
      const int64_t x = prev[k].x + rx;
      const int64_t y = prev[k].y + ry;
      if (std::abs(x) > kIndexLimit || std::abs(y) > kIndexLimit) {
        throw DecodeError("frame " + std::to_string(l) + ": keypoint index out of range");
      }
      cur[k] = {static_cast<int32_t>(x), static_cast<int32_t>(y)};
      prev_class[2 * k] = magnitude_class(rx);
      prev_class[2 * k + 1] = magnitude_class(ry);
    }
    track.frames.push_back(dequantize_keypoints(cur, qstep));
    prev = std::move(cur);
  }
  dec.finish();
  return track;
}

Frame synthesize_base(const Frame& key_recon, const KeypointSet& kp_key,
                      const KeypointSet& kp_cur, double tau,
                      double background_weight) {
  return warp_bilinear(key_recon,
                       dense_motion_from_keypoints(kp_key, kp_cur, tau, key_recon.width,
                                                   key_recon.height, background_weight));
}

}  // namespace pgen
