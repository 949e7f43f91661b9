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

#include "pgen/keypoints.h"

#include <cassert>
#include <cmath>
#include <string>

#include "pgen/byte_io.h"
#include "pgen/errors.h"

namespace pgen {

MotionField dense_motion_from_keypoints(const KeypointSet& reference,
                                        const KeypointSet& current, double tau,
                                        int width, int height,
                                        double background_weight) {
  if (reference.size() != current.size()) {
    throw InvalidArgument("dense_motion_from_keypoints: keypoint count mismatch");
  }
  if (!(tau > 0)) throw InvalidArgument("dense_motion_from_keypoints: tau must be > 0");
  if (width <= 0 || height <= 0) {
    throw InvalidArgument("dense_motion_from_keypoints: empty frame");
  }

  MotionField field(width, height);
  const size_t n = current.size();
  if (n == 0) return field;

  const double sx = width - 1.0;
  const double sy = height - 1.0;
  std::vector<double> cx(n), cy(n), ddx(n), ddy(n);
  for (size_t k = 0; k < n; ++k) {
    cx[k] = current.points[k].x * sx;
    cy[k] = current.points[k].y * sy;
    ddx[k] = reference.points[k].x * sx - cx[k];
    ddy[k] = reference.points[k].y * sy - cy[k];
  }
  const double inv = 1.0 / (2.0 * tau * tau);
  std::vector<double> g(n);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double total = background_weight;
      for (size_t k = 0; k < n; ++k) {
        const double ex = x - cx[k];
        const double ey = y - cy[k];
        g[k] = std::exp(-(ex * ex + ey * ey) * inv);
        total += g[k];
      }
      double mx = 0, my = 0, wsum = background_weight / total;
      for (size_t k = 0; k < n; ++k) {
        const double wk = g[k] / total;
        wsum += wk;
        mx += wk * ddx[k];
        my += wk * ddy[k];
      }
      assert(std::abs(wsum - 1.0) <= 1e-6);
      const size_t i = static_cast<size_t>(y) * width + x;
      field.dx[i] = mx;
      field.dy[i] = my;
    }
  }
  return field;
}

std::vector<uint8_t> write_track(const KeypointTrack& track) {
  ByteWriter w;
  w.tag("PGKT");
  w.u32(static_cast<uint32_t>(track.frames.size()));
  w.u32(static_cast<uint32_t>(track.keypoint_count()));
  for (const KeypointSet& set : track.frames) {
    if (set.size() != track.keypoint_count()) {
      throw InvalidArgument("write_track: keypoint count varies across frames");
    }
    for (const Keypoint& p : set.points) {
      w.f64(p.x);
      w.f64(p.y);
    }
  }
  return w.take();
}

KeypointTrack read_track(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  if (!r.tag("PGKT")) throw FormatError("track: bad magic");
  const uint32_t frames = r.u32("track frame count");
  const uint32_t count = r.u32("track keypoint count");
  if (r.remaining() != uint64_t{frames} * count * 16) {
    throw FormatError("track: payload size does not match header");
  }
  KeypointTrack track;
  track.frames.resize(frames);
  for (auto& set : track.frames) {
    set.points.resize(count);
    for (auto& p : set.points) {
      p.x = r.f64("track x");
      p.y = r.f64("track y");
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw FormatError("track: non-finite coordinate");
      }
    }
  }
  return track;
}

}  // namespace pgen
