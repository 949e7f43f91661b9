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

// Frame/video data model, the PGRV raw container, and the resampling and
// warping primitives shared by the base and enhancement layers.

#ifndef PGEN_MEDIA_H_
#define PGEN_MEDIA_H_

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pgen {

constexpr int kChannels = 3;

// Planar 8-bit RGB image: plane R, then G, then B, each row-major.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;

  Frame() = default;
  Frame(int w, int h, uint8_t fill = 0)
      : width(w), height(h),
        data(static_cast<size_t>(kChannels) * w * h, fill) {}

  size_t plane_size() const { return static_cast<size_t>(width) * height; }

  std::span<uint8_t> plane(int c) {
    return {data.data() + c * plane_size(), plane_size()};
  }
  std::span<const uint8_t> plane(int c) const {
    return {data.data() + c * plane_size(), plane_size()};
  }

  uint8_t& at(int c, int x, int y) {
    return data[c * plane_size() + static_cast<size_t>(y) * width + x];
  }
  uint8_t at(int c, int x, int y) const {
    return data[c * plane_size() + static_cast<size_t>(y) * width + x];
  }

  bool valid() const {
    return width > 0 && height > 0 && data.size() == kChannels * plane_size();
  }

  bool operator==(const Frame&) const = default;
};

struct VideoSequence {
  std::vector<Frame> frames;  // frames[0] is the key-reference frame
  int fps = 25;

  int width() const { return frames.empty() ? 0 : frames.front().width; }
  int height() const { return frames.empty() ? 0 : frames.front().height; }

  bool operator==(const VideoSequence&) const = default;
};

// Backward displacement field: destination p samples the source at p + d(p).
struct MotionField {
  int width = 0;
  int height = 0;
  std::vector<double> dx;
  std::vector<double> dy;

  MotionField() = default;
  MotionField(int w, int h)
      : width(w), height(h),
        dx(static_cast<size_t>(w) * h, 0.0),
        dy(static_cast<size_t>(w) * h, 0.0) {}
};

// Per-pixel confidence in [0,1] that the warped key frame is usable.
struct OcclusionMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  OcclusionMap() = default;
  OcclusionMap(int w, int h, double fill = 1.0)
      : width(w), height(h), values(static_cast<size_t>(w) * h, fill) {}
};

// s x s real-valued luminance grid, values nominally in [0,255].
struct FeatureMap {
  int side = 0;
  std::vector<double> values;

  FeatureMap() = default;
  explicit FeatureMap(int s, double fill = 0.0)
      : side(s), values(static_cast<size_t>(s) * s, fill) {}

  double& at(int x, int y) { return values[static_cast<size_t>(y) * side + x]; }
  double at(int x, int y) const {
    return values[static_cast<size_t>(y) * side + x];
  }
};

// Granularities the enhancement layer supports.
constexpr int kFeatureSides[] = {8, 16, 32};
bool is_supported_side(int side);

// BT.601 luma of every pixel, row-major.
std::vector<double> luminance(const Frame& frame);

// Low-pass filters the luminance with a separable binomial [1,4,6,4,1]/16
// kernel (edge-replicated), decimating by 2 per octave, then box-averages to
// exactly side x side.
FeatureMap downsample_band_limited(const Frame& frame, int side);

// Bilinear interpolation of a src_w x src_h cell grid onto a dst_w x dst_h
// pixel grid; cell centers sit at ((i + 0.5) * dst/src - 0.5) and samples
// beyond the outermost centers are clamped.
std::vector<double> upsample_bilinear(std::span<const double> grid, int src_w,
                                      int src_h, int dst_w, int dst_h);

// Backward bilinear warp with coordinate clamping and round-to-nearest.
Frame warp_bilinear(const Frame& frame, const MotionField& field);

// PGRV: "PGRV", u32 width, u32 height, u32 frame_count, u32 fps (all LE),
// then frame_count planar RGB frames.
std::vector<uint8_t> write_raw_video(const VideoSequence& seq);
VideoSequence read_raw_video(std::span<const uint8_t> bytes);

std::vector<uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const uint8_t> bytes);

}  // namespace pgen

#endif  // PGEN_MEDIA_H_
