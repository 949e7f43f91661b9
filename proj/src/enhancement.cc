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

#include "pgen/enhancement.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "pgen/entropy.h"
#include "pgen/errors.h"

namespace pgen {

namespace {

void check_q_f(double q_f) {
  if (!(q_f > 0) || !std::isfinite(q_f)) {
    throw InvalidArgument("feature quantizer gain must be positive and finite");
  }
}

void check_sides(const FeatureMap& a, const FeatureMap& b) {
  if (a.side != b.side || a.values.size() != b.values.size()) {
    throw InvalidArgument("feature side mismatch: " + std::to_string(a.side) + " vs " +
                          std::to_string(b.side));
  }
}

// Mean of the decoded left and top symbols, 0 when neither exists.
double causal_mean(const std::vector<int>& q, int side, int x, int y) {
  int sum = 0;
  int n = 0;
  if (x > 0) {
    sum += q[static_cast<size_t>(y) * side + x - 1];
    ++n;
  }
  if (y > 0) {
    sum += q[static_cast<size_t>(y - 1) * side + x];
    ++n;
  }
  return n == 0 ? 0.0 : static_cast<double>(sum) / n;
}

// Luminance scaled by 1000 so BT.601 weights stay exact integers.
std::vector<int32_t> luma_milli(const Frame& f) {
  const auto r = f.plane(0);
  const auto g = f.plane(1);
  const auto b = f.plane(2);
  std::vector<int32_t> y(f.plane_size());
  for (size_t i = 0; i < y.size(); ++i) y[i] = 299 * r[i] + 587 * g[i] + 114 * b[i];
  return y;
}

bool better(int64_t sad, int dx, int dy, int64_t best_sad, int bdx, int bdy) {
  if (sad != best_sad) return sad < best_sad;
  const int cost = std::abs(dx) + std::abs(dy);
  const int best_cost = std::abs(bdx) + std::abs(bdy);
  if (cost != best_cost) return cost < best_cost;
  if (dy != bdy) return dy < bdy;
  return dx < bdx;
}

void check_same_size(const Frame& a, const Frame& b, const char* what) {
  if (a.width != b.width || a.height != b.height || !a.valid() || !b.valid()) {
    throw InvalidArgument(std::string(what) + ": frame dimensions differ");
  }
}

}  // namespace

int level_for_side(int side) {
  for (const GranularityLevel& l : kGranularityLevels) {
    if (l.side == side) return l.id;
  }
  throw InvalidArgument("unsupported granularity " + std::to_string(side));
}

FeatureMap extract_feature(const Frame& frame, int side) {
  return downsample_band_limited(frame, side);
}

FeatureMap predict_sigma(const FeatureMap& base) {
  const int s = base.side;
  FeatureMap sigma(s);
  for (int y = 0; y < s; ++y) {
    for (int x = 0; x < s; ++x) {
      const double v = base.at(x, y);
      const double g = (std::abs(v - base.at(std::max(x - 1, 0), y)) +
                        std::abs(v - base.at(std::min(x + 1, s - 1), y)) +
                        std::abs(v - base.at(x, std::max(y - 1, 0))) +
                        std::abs(v - base.at(x, std::min(y + 1, s - 1)))) /
                       4.0;
      sigma.at(x, y) = kFeatureSigmaMin + kFeatureSigmaSlope * g;
    }
  }
  return sigma;
}

uint16_t feature_checksum(const FeatureMap& feature) {
  uint32_t a = 0;
  uint32_t b = 0;
  auto add = [&](uint8_t byte) {
    a = (a + byte) % 255;
    b = (b + a) % 255;
  };
  for (double v : feature.values) {
    const auto q = static_cast<uint16_t>(static_cast<int16_t>(std::lround(v * 16.0)));
    add(static_cast<uint8_t>(q & 0xFF));
    add(static_cast<uint8_t>(q >> 8));
  }
  return static_cast<uint16_t>((b << 8) | a);
}

FeaturePayload encode_feature(const FeatureMap& feature, const FeatureMap& base,
                              double q_f) {
  check_sides(feature, base);
  check_q_f(q_f);
  const int s = base.side;
  const FeatureMap sigma = predict_sigma(base);

  RangeEncoder enc;
  std::vector<int> q(base.values.size());
  for (int y = 0; y < s; ++y) {
    for (int x = 0; x < s; ++x) {
      const size_t i = static_cast<size_t>(y) * s + x;
      const double sym = std::round((feature.values[i] - base.values[i]) * q_f);
      if (std::abs(sym) > std::numeric_limits<int>::max() / 2) {
        throw InvalidArgument("feature residual symbol out of range");
      }
      q[i] = static_cast<int>(sym);
      GaussianBinModel(causal_mean(q, s, x, y), sigma.values[i]).encode(enc, q[i]);
    }
  }
  return {feature_checksum(base), enc.finish()};
}

FeatureMap decode_feature(const FeaturePayload& payload, const FeatureMap& base,
                          double q_f) {
  check_q_f(q_f);
  if (payload.checksum != feature_checksum(base)) {
    throw ProtocolError("base feature checksum mismatch: encoder and decoder base "
                        "layers diverged");
  }
  const int s = base.side;
  const FeatureMap sigma = predict_sigma(base);

  RangeDecoder dec(payload.bytes);
  std::vector<int> q(base.values.size());
  FeatureMap out(s);
  for (int y = 0; y < s; ++y) {
    for (int x = 0; x < s; ++x) {
      const size_t i = static_cast<size_t>(y) * s + x;
      q[i] = GaussianBinModel(causal_mean(q, s, x, y), sigma.values[i]).decode(dec);
      out.values[i] = std::clamp(base.values[i] + q[i] / q_f, 0.0, 255.0);
    }
  }
  dec.finish();
  return out;
}

Frame recalibrate(const Frame& base_frame, const FeatureMap& s_hat) {
  const FeatureMap f = extract_feature(base_frame, s_hat.side);
  std::vector<double> gain(f.values.size());
  for (size_t i = 0; i < gain.size(); ++i) {
    gain[i] = std::clamp((s_hat.values[i] + kGainEpsilon) / (f.values[i] + kGainEpsilon),
                         kGainMin, kGainMax);
  }
  const std::vector<double> g = upsample_bilinear(gain, s_hat.side, s_hat.side,
                                                  base_frame.width, base_frame.height);
  Frame out(base_frame.width, base_frame.height);
  const size_t n = base_frame.plane_size();
  for (int c = 0; c < kChannels; ++c) {
    const auto src = base_frame.plane(c);
    auto dst = out.plane(c);
    for (size_t i = 0; i < n; ++i) {
      dst[i] = static_cast<uint8_t>(std::clamp(std::floor(src[i] * g[i] + 0.5), 0.0, 255.0));
    }
  }
  return out;
}

RefinedMotion refine_motion(const Frame& key_recon, const Frame& coarse, int block,
                            int search) {
  check_same_size(key_recon, coarse, "refine_motion");
  if (block <= 0 || search < 0) throw InvalidArgument("refine_motion: bad block/search");
  const int w = coarse.width;
  const int h = coarse.height;
  if (w % block != 0 || h % block != 0) {
    throw InvalidArgument("refine_motion: frame size is not a multiple of the block size");
  }
  const int bw = w / block;
  const int bh = h / block;
  const std::vector<int32_t> ref = luma_milli(key_recon);
  const std::vector<int32_t> cur = luma_milli(coarse);

  RefinedMotion out;
  out.block = block;
  out.blocks.resize(static_cast<size_t>(bw) * bh);
  for (int by = 0; by < bh; ++by) {
    for (int bx = 0; bx < bw; ++bx) {
      const int x0 = bx * block;
      const int y0 = by * block;
      int64_t best = std::numeric_limits<int64_t>::max();
      int best_dx = 0;
      int best_dy = 0;
      for (int dy = -search; dy <= search; ++dy) {
        if (y0 + dy < 0 || y0 + dy + block > h) continue;
        for (int dx = -search; dx <= search; ++dx) {
          if (x0 + dx < 0 || x0 + dx + block > w) continue;
          int64_t sad = 0;
          for (int y = 0; y < block && sad <= best; ++y) {
            const int32_t* a = &cur[static_cast<size_t>(y0 + y) * w + x0];
            const int32_t* b = &ref[static_cast<size_t>(y0 + dy + y) * w + x0 + dx];
            int32_t row = 0;
            for (int x = 0; x < block; ++x) row += std::abs(a[x] - b[x]);
            sad += row;
          }
          if (sad <= best && better(sad, dx, dy, best, best_dx, best_dy)) {
            best = sad;
            best_dx = dx;
            best_dy = dy;
          }
        }
      }
      out.blocks[static_cast<size_t>(by) * bw + bx] = {
          best_dx, best_dy, best / 1000.0 / (static_cast<double>(block) * block)};
    }
  }

  std::vector<double> gx(out.blocks.size()), gy(out.blocks.size());
  for (size_t i = 0; i < out.blocks.size(); ++i) {
    gx[i] = out.blocks[i].dx;
    gy[i] = out.blocks[i].dy;
  }
  out.field.width = w;
  out.field.height = h;
  out.field.dx = upsample_bilinear(gx, bw, bh, w, h);
  out.field.dy = upsample_bilinear(gy, bw, bh, w, h);

  out.occlusion = OcclusionMap(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const BlockVector& v = out.blocks[static_cast<size_t>(y / block) * bw + x / block];
      out.occlusion.values[static_cast<size_t>(y) * w + x] =
          std::clamp(1.0 - v.sad_per_pixel / kOcclusionSadScale, 0.0, 1.0);
    }
  }
  return out;
}

Frame compose_fine(const Frame& key_recon, const Frame& coarse, const MotionField& field,
                   const OcclusionMap& occlusion) {
  check_same_size(key_recon, coarse, "compose_fine");
  if (occlusion.width != coarse.width || occlusion.height != coarse.height) {
    throw InvalidArgument("compose_fine: occlusion map dimensions differ");
  }
  const Frame warped = warp_bilinear(key_recon, field);
  Frame out(coarse.width, coarse.height);
  const size_t n = coarse.plane_size();
  for (int c = 0; c < kChannels; ++c) {
    const auto wp = warped.plane(c);
    const auto cp = coarse.plane(c);
    auto dst = out.plane(c);
    for (size_t i = 0; i < n; ++i) {
      const double o = occlusion.values[i];
      const double v = o * wp[i] + (1.0 - o) * cp[i];
      dst[i] = static_cast<uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    }
  }
  return out;
}

}  // namespace pgen
