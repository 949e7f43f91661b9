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

#include "pgen/media.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>

#include "pgen/byte_io.h"
#include "pgen/errors.h"

namespace pgen {

namespace {

constexpr double kLumaR = 0.299;
constexpr double kLumaG = 0.587;
constexpr double kLumaB = 0.114;

// One octave of the binomial pyramid: filter both axes, keep even samples.
std::vector<double> reduce_octave(const std::vector<double>& in, int w, int h,
                                  int* out_w, int* out_h) {
  static constexpr double kTaps[5] = {1 / 16.0, 4 / 16.0, 6 / 16.0, 4 / 16.0,
                                      1 / 16.0};
  const int ow = (w + 1) / 2;
  const int oh = (h + 1) / 2;

  // Horizontal pass only at the kept columns.
  std::vector<double> tmp(static_cast<size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    const double* row = &in[static_cast<size_t>(y) * w];
    for (int ox = 0; ox < ow; ++ox) {
      const int x = 2 * ox;
      double acc = 0;
      for (int k = -2; k <= 2; ++k) {
        acc += kTaps[k + 2] * row[std::clamp(x + k, 0, w - 1)];
      }
      tmp[static_cast<size_t>(y) * ow + ox] = acc;
    }
  }

  std::vector<double> out(static_cast<size_t>(ow) * oh);
  for (int oy = 0; oy < oh; ++oy) {
    const int y = 2 * oy;
    for (int ox = 0; ox < ow; ++ox) {
      double acc = 0;
      for (int k = -2; k <= 2; ++k) {
        acc += kTaps[k + 2] *
               tmp[static_cast<size_t>(std::clamp(y + k, 0, h - 1)) * ow + ox];
      }
      out[static_cast<size_t>(oy) * ow + ox] = acc;
    }
  }
  *out_w = ow;
  *out_h = oh;
  return out;
}

// Row i of the returned (dst x src) matrix holds the area weights of source
// samples covered by destination cell i.
std::vector<double> box_weights(int src, int dst) {
  std::vector<double> w(static_cast<size_t>(dst) * src, 0.0);
  const double scale = static_cast<double>(src) / dst;
  for (int i = 0; i < dst; ++i) {
    const double lo = i * scale;
    const double hi = (i + 1) * scale;
    for (int j = static_cast<int>(std::floor(lo)); j < src && j < hi; ++j) {
      const double overlap = std::min<double>(hi, j + 1) - std::max<double>(lo, j);
      if (overlap > 0) w[static_cast<size_t>(i) * src + j] = overlap / scale;
    }
  }
  return w;
}

uint8_t round_to_sample(double v) {
  return static_cast<uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

}  // namespace

bool is_supported_side(int side) {
  return std::find(std::begin(kFeatureSides), std::end(kFeatureSides), side) !=
         std::end(kFeatureSides);
}

std::vector<double> luminance(const Frame& frame) {
  assert(frame.valid());
  const auto r = frame.plane(0);
  const auto g = frame.plane(1);
  const auto b = frame.plane(2);
  std::vector<double> y(frame.plane_size());
  for (size_t i = 0; i < y.size(); ++i) {
    y[i] = kLumaR * r[i] + kLumaG * g[i] + kLumaB * b[i];
  }
  return y;
}

FeatureMap downsample_band_limited(const Frame& frame, int side) {
  if (!is_supported_side(side)) {
    throw InvalidArgument("unsupported feature side " + std::to_string(side));
  }
  if (side > std::min(frame.width, frame.height)) {
    throw InvalidArgument("feature side exceeds frame size");
  }

  std::vector<double> plane = luminance(frame);
  int w = frame.width;
  int h = frame.height;
  int octaves = 0;
  while ((std::min(w, h) >> (octaves + 1)) >= side) ++octaves;
  for (int i = 0; i < octaves; ++i) {
    plane = reduce_octave(plane, w, h, &w, &h);
  }

  FeatureMap out(side);
  if (w == side && h == side) {
    out.values = std::move(plane);
    return out;
  }
  const std::vector<double> wx = box_weights(w, side);
  const std::vector<double> wy = box_weights(h, side);
  std::vector<double> rows(static_cast<size_t>(side) * h, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int i = 0; i < side; ++i) {
      double acc = 0;
      for (int x = 0; x < w; ++x) {
        acc += wx[static_cast<size_t>(i) * w + x] * plane[static_cast<size_t>(y) * w + x];
      }
      rows[static_cast<size_t>(y) * side + i] = acc;
    }
  }
  for (int j = 0; j < side; ++j) {
    for (int i = 0; i < side; ++i) {
      double acc = 0;
      for (int y = 0; y < h; ++y) {
        acc += wy[static_cast<size_t>(j) * h + y] * rows[static_cast<size_t>(y) * side + i];
      }
      out.at(i, j) = acc;
    }
  }
  return out;
}

std::vector<double> upsample_bilinear(std::span<const double> grid, int src_w,
                                      int src_h, int dst_w, int dst_h) {
  if (grid.size() != static_cast<size_t>(src_w) * src_h || src_w <= 0 ||
      src_h <= 0 || dst_w <= 0 || dst_h <= 0) {
    throw InvalidArgument("upsample_bilinear: bad grid dimensions");
  }
  // Per-axis source position tables.
  auto axis = [](int src, int dst, std::vector<int>* i0, std::vector<int>* i1,
                 std::vector<double>* frac) {
    i0->resize(dst);
    i1->resize(dst);
    frac->resize(dst);
    const double scale = static_cast<double>(src) / dst;
    for (int d = 0; d < dst; ++d) {
      const double g = std::clamp((d + 0.5) * scale - 0.5, 0.0, src - 1.0);
      const int lo = static_cast<int>(std::floor(g));
      (*i0)[d] = lo;
      (*i1)[d] = std::min(lo + 1, src - 1);
      (*frac)[d] = g - lo;
    }
  };
  std::vector<int> x0, x1, y0, y1;
  std::vector<double> fx, fy;
  axis(src_w, dst_w, &x0, &x1, &fx);
  axis(src_h, dst_h, &y0, &y1, &fy);

  std::vector<double> out(static_cast<size_t>(dst_w) * dst_h);
  for (int y = 0; y < dst_h; ++y) {
    const double* r0 = &grid[static_cast<size_t>(y0[y]) * src_w];
    const double* r1 = &grid[static_cast<size_t>(y1[y]) * src_w];
    for (int x = 0; x < dst_w; ++x) {
      const double top = r0[x0[x]] + fx[x] * (r0[x1[x]] - r0[x0[x]]);
      const double bot = r1[x0[x]] + fx[x] * (r1[x1[x]] - r1[x0[x]]);
      out[static_cast<size_t>(y) * dst_w + x] = top + fy[y] * (bot - top);
    }
  }
  return out;
}

Frame warp_bilinear(const Frame& frame, const MotionField& field) {
  if (field.width != frame.width || field.height != frame.height) {
    throw InvalidArgument("warp_bilinear: field/frame dimension mismatch");
  }
  const int w = frame.width;
  const int h = frame.height;
  Frame out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t i = static_cast<size_t>(y) * w + x;
      const double sx = std::clamp(x + field.dx[i], 0.0, w - 1.0);
      const double sy = std::clamp(y + field.dy[i], 0.0, h - 1.0);
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, h - 1);
      const double fx = sx - x0;
      const double fy = sy - y0;
      for (int c = 0; c < kChannels; ++c) {
        const double a = frame.at(c, x0, y0);
        const double b = frame.at(c, x1, y0);
        const double d = frame.at(c, x0, y1);
        const double e = frame.at(c, x1, y1);
        const double top = a * (1 - fx) + b * fx;
        const double bot = d * (1 - fx) + e * fx;
        out.at(c, x, y) = round_to_sample(top * (1 - fy) + bot * fy);
      }
    }
  }
  return out;
}

std::vector<uint8_t> write_raw_video(const VideoSequence& seq) {
  ByteWriter w;
  w.tag("PGRV");
  w.u32(static_cast<uint32_t>(seq.width()));
  w.u32(static_cast<uint32_t>(seq.height()));
  w.u32(static_cast<uint32_t>(seq.frames.size()));
  w.u32(static_cast<uint32_t>(seq.fps));
  for (const Frame& f : seq.frames) {
    if (f.width != seq.width() || f.height != seq.height() || !f.valid()) {
      throw InvalidArgument("write_raw_video: inconsistent frame dimensions");
    }
    w.bytes(f.data);
  }
  return w.take();
}

VideoSequence read_raw_video(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  if (!r.tag("PGRV")) throw FormatError("PGRV: bad magic");
  const uint32_t width = r.u32("PGRV width");
  const uint32_t height = r.u32("PGRV height");
  const uint32_t count = r.u32("PGRV frame count");
  const uint32_t fps = r.u32("PGRV fps");
  if (width == 0 || height == 0) throw FormatError("PGRV: zero-area frame");
  constexpr uint64_t kMaxDim = 1u << 15;
  if (width > kMaxDim || height > kMaxDim ||
      fps > static_cast<uint32_t>(std::numeric_limits<int>::max())) {
    throw FormatError("PGRV: dimension overflow");
  }
  const uint64_t frame_bytes = uint64_t{kChannels} * width * height;
  if (count > 0 && r.remaining() / frame_bytes < count) {
    throw FormatError("PGRV: truncated payload (header declares " +
                      std::to_string(count) + " frames)");
  }
  if (r.remaining() != frame_bytes * count) {
    throw FormatError("PGRV: trailing bytes after last frame");
  }
  VideoSequence seq;
  seq.fps = static_cast<int>(fps);
  seq.frames.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    Frame f(static_cast<int>(width), static_cast<int>(height));
    auto src = r.bytes(frame_bytes, "PGRV frame");
    std::copy(src.begin(), src.end(), f.data.begin());
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path);
}

}  // namespace pgen
