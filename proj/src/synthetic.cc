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

#include "pgen/synthetic.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "pgen/errors.h"

namespace pgen {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Grating {
  double fx, fy;  // cycles per pixel along x and y
  double phase;
  double amplitude;
};

Grating random_grating(SplitMix64& rng, double fmin, double fmax, double amp) {
  const double f = rng.uniform(fmin, fmax);
  const double angle = rng.uniform(0.0, std::numbers::pi);
  return {f * std::cos(angle), f * std::sin(angle), rng.uniform(0.0, kTwoPi), amp};
}

Frame textured_key_frame(const SyntheticSpec& spec, SplitMix64& rng,
                         double* cx, double* cy, double* ax, double* ay) {
  const int w = spec.width;
  const int h = spec.height;

  std::array<double, 3> bg0, bgx, bgy;
  for (int c = 0; c < 3; ++c) {
    bg0[c] = rng.uniform(30.0, 90.0);
    bgx[c] = rng.uniform(-30.0, 90.0);
    bgy[c] = rng.uniform(-30.0, 90.0);
  }

  *cx = w * rng.uniform(0.45, 0.55);
  *cy = h * rng.uniform(0.45, 0.55);
  *ax = w * rng.uniform(0.28, 0.34);
  *ay = h * rng.uniform(0.34, 0.40);
  const std::array<double, 3> skin = {rng.uniform(150.0, 190.0),
                                      rng.uniform(110.0, 140.0),
                                      rng.uniform(90.0, 120.0)};
  static constexpr std::array<double, 3> kChromaScale = {1.0, 0.9, 0.8};

  // Mid-frequency structure plus a high-frequency detail layer.
  std::array<Grating, 10> gratings;
  for (int i = 0; i < 6; ++i) gratings[i] = random_grating(rng, 0.02, 0.08, 18.0);
  for (int i = 6; i < 10; ++i) gratings[i] = random_grating(rng, 0.15, 0.35, 10.0);

  Frame frame(w, h);
  const double edge = std::min(*ax, *ay);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double ex = (x - *cx) / *ax;
      const double ey = (y - *cy) / *ay;
      const double r = std::sqrt(ex * ex + ey * ey);
      // ~2 px anti-aliased rim.
      const double mask = std::clamp((1.0 - r) * edge * 0.5 + 0.5, 0.0, 1.0);
      double tex = 0;
      if (mask > 0) {
        for (const Grating& g : gratings) {
          tex += g.amplitude * std::sin(kTwoPi * (g.fx * x + g.fy * y) + g.phase);
        }
      }
      for (int c = 0; c < 3; ++c) {
        const double bg = bg0[c] + bgx[c] * x / w + bgy[c] * y / h;
        const double face = skin[c] + kChromaScale[c] * tex;
        const double v = bg * (1.0 - mask) + face * mask;
        frame.at(c, x, y) =
            static_cast<uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
      }
    }
  }
  return frame;
}

struct Oscillator {
  double amplitude, freq, phase;
  // Zero at l = 0, bounded by `amplitude` in magnitude.
  double at(int l) const {
    return amplitude * 0.5 * (std::sin(kTwoPi * freq * l + phase) - std::sin(phase));
  }
};

}  // namespace

SyntheticSequence generate_synthetic_sequence(const SyntheticSpec& spec) {
  if (spec.width <= 0 || spec.height <= 0) {
    throw InvalidArgument("synthetic: zero-area frame");
  }
  if (spec.frame_count < 2) throw InvalidArgument("synthetic: frame_count must be >= 2");
  if (spec.keypoint_count < 0) throw InvalidArgument("synthetic: negative keypoint count");
  if (!(spec.kernel_bandwidth > 0)) throw InvalidArgument("synthetic: tau must be > 0");
  if (spec.fps <= 0) throw InvalidArgument("synthetic: fps must be > 0");

  SplitMix64 rng(spec.seed);
  double cx, cy, ax, ay;
  Frame key = textured_key_frame(spec, rng, &cx, &cy, &ax, &ay);

  const double sx = spec.width - 1.0;
  const double sy = spec.height - 1.0;
  KeypointSet origin;
  for (int n = 0; n < spec.keypoint_count; ++n) {
    const double theta = rng.uniform(0.0, kTwoPi);
    const double rad = 0.8 * std::sqrt(rng.uniform());
    origin.points.push_back({std::clamp((cx + ax * rad * std::cos(theta)) / sx, 0.0, 1.0),
                             std::clamp((cy + ay * rad * std::sin(theta)) / sy, 0.0, 1.0)});
  }

  // Independent smooth oscillation per keypoint and axis.
  const double amp = spec.motion_amplitude;
  std::vector<Oscillator> osc_x, osc_y;
  for (int n = 0; n < spec.keypoint_count; ++n) {
    osc_x.push_back({amp, rng.uniform(0.01, 0.05), rng.uniform(0.0, kTwoPi)});
    osc_y.push_back({amp, rng.uniform(0.01, 0.05), rng.uniform(0.0, kTwoPi)});
  }

  SyntheticSequence out;
  out.video.fps = spec.fps;
  out.track.frames.reserve(spec.frame_count);
  out.video.frames.reserve(spec.frame_count);
  for (int l = 0; l < spec.frame_count; ++l) {
    KeypointSet cur;
    for (int n = 0; n < spec.keypoint_count; ++n) {
      const Keypoint& p = origin.points[n];
      const double dx = osc_x[n].at(l);
      const double dy = osc_y[n].at(l);
      cur.points.push_back({std::clamp(p.x + dx / sx, 0.0, 1.0),
                            std::clamp(p.y + dy / sy, 0.0, 1.0)});
    }
    if (l == 0) {
      out.video.frames.push_back(key);
    } else {
      out.video.frames.push_back(warp_bilinear(
          key, dense_motion_from_keypoints(origin, cur, spec.kernel_bandwidth,
                                           spec.width, spec.height)));
    }
    out.track.frames.push_back(std::move(cur));
  }
  return out;
}

}  // namespace pgen
