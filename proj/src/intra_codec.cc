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

#include "pgen/intra_codec.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "pgen/entropy.h"
#include "pgen/errors.h"

namespace pgen {

namespace {

constexpr int kBlock = 8;
constexpr int kCoeffs = kBlock * kBlock;
constexpr int kDcAlphabet = 17;   // size categories 0..16
constexpr int kAcAlphabet = 256;  // (run << 4) | size
constexpr int kEob = 0x00;
constexpr int kZrl = 0xF0;

struct Tables {
  double basis[kBlock][kBlock];  // basis[u][x] = c(u) cos((2x + 1) u pi / 16)
  int zigzag[kCoeffs];           // scan position -> raster index
};

const Tables& tables() {
  static const Tables t = [] {
    Tables t{};
    for (int u = 0; u < kBlock; ++u) {
      const double cu = u == 0 ? std::sqrt(1.0 / kBlock) : std::sqrt(2.0 / kBlock);
      for (int x = 0; x < kBlock; ++x) {
        t.basis[u][x] = cu * std::cos((2 * x + 1) * u * std::numbers::pi / (2 * kBlock));
      }
    }
    int i = 0;
    for (int s = 0; s < 2 * kBlock - 1; ++s) {
      for (int j = 0; j <= s; ++j) {
        const int a = s % 2 == 0 ? s - j : j;  // row
        const int b = s - a;                   // column
        if (a < kBlock && b < kBlock) t.zigzag[i++] = a * kBlock + b;
      }
    }
    return t;
  }();
  return t;
}

void forward_dct(const double in[kCoeffs], double out[kCoeffs]) {
  const Tables& t = tables();
  double tmp[kCoeffs];
  for (int y = 0; y < kBlock; ++y) {
    for (int u = 0; u < kBlock; ++u) {
      double acc = 0;
      for (int x = 0; x < kBlock; ++x) acc += t.basis[u][x] * in[y * kBlock + x];
      tmp[y * kBlock + u] = acc;
    }
  }
  for (int v = 0; v < kBlock; ++v) {
    for (int u = 0; u < kBlock; ++u) {
      double acc = 0;
      for (int y = 0; y < kBlock; ++y) acc += t.basis[v][y] * tmp[y * kBlock + u];
      out[v * kBlock + u] = acc;
    }
  }
}

void inverse_dct(const double in[kCoeffs], double out[kCoeffs]) {
  const Tables& t = tables();
  double tmp[kCoeffs];
  for (int v = 0; v < kBlock; ++v) {
    for (int x = 0; x < kBlock; ++x) {
      double acc = 0;
      for (int u = 0; u < kBlock; ++u) acc += t.basis[u][x] * in[v * kBlock + u];
      tmp[v * kBlock + x] = acc;
    }
  }
  for (int y = 0; y < kBlock; ++y) {
    for (int x = 0; x < kBlock; ++x) {
      double acc = 0;
      for (int v = 0; v < kBlock; ++v) acc += t.basis[v][y] * tmp[v * kBlock + x];
      out[y * kBlock + x] = acc;
    }
  }
}

void check_args(int width, int height, int qp) {
  if (width <= 0 || height <= 0 || width % kBlock != 0 || height % kBlock != 0) {
    throw InvalidArgument("intra codec: dimensions " + std::to_string(width) + "x" +
                          std::to_string(height) + " are not multiples of 8");
  }
  if (qp < 0 || qp > kMaxQp) {
    throw InvalidArgument("intra codec: qp " + std::to_string(qp) + " out of range");
  }
}

// Magnitude category and JPEG-style value bits.
int size_of(int v) { return std::bit_width(static_cast<unsigned>(std::abs(v))); }
uint32_t bits_of(int v, int size) {
  return v >= 0 ? static_cast<uint32_t>(v)
                : static_cast<uint32_t>(v + (1 << size) - 1);
}
int value_of(uint32_t bits, int size) {
  if (size == 0) return 0;
  const int v = static_cast<int>(bits);
  return (bits >> (size - 1)) ? v : v - (1 << size) + 1;
}

void reconstruct_block(const int idx[kCoeffs], double dc_step, double ac_step,
                       Frame& frame, int c, int bx, int by) {
  double coef[kCoeffs];
  double pix[kCoeffs];
  for (int i = 0; i < kCoeffs; ++i) coef[i] = idx[i] * (i == 0 ? dc_step : ac_step);
  inverse_dct(coef, pix);
  for (int y = 0; y < kBlock; ++y) {
    for (int x = 0; x < kBlock; ++x) {
      const double v = std::floor(pix[y * kBlock + x] + 128.0 + 0.5);
      frame.at(c, bx + x, by + y) = static_cast<uint8_t>(std::clamp(v, 0.0, 255.0));
    }
  }
}

}  // namespace

bool is_qp_in_set(int qp) {
  return std::find(kQpSet.begin(), kQpSet.end(), qp) != kQpSet.end();
}

double quant_step(int qp) { return std::max(1.0, std::exp2((qp - 4) / 6.0)); }

double dc_quant_step(int qp) { return std::min(quant_step(qp), 8.0); }

IntraResult encode_key_frame(const Frame& frame, int qp) {
  check_args(frame.width, frame.height, qp);
  const Tables& t = tables();
  const double ac_step = quant_step(qp);
  const double dc_step = dc_quant_step(qp);

  RangeEncoder enc;
  AdaptiveModel dc_model(kDcAlphabet, kChannels);
  AdaptiveModel ac_model(kAcAlphabet, kChannels);
  IntraResult result{{}, Frame(frame.width, frame.height)};

  for (int c = 0; c < kChannels; ++c) {
    int prev_dc = 0;
    for (int by = 0; by < frame.height; by += kBlock) {
      for (int bx = 0; bx < frame.width; bx += kBlock) {
        double pix[kCoeffs];
        double coef[kCoeffs];
        for (int y = 0; y < kBlock; ++y) {
          for (int x = 0; x < kBlock; ++x) {
            pix[y * kBlock + x] = frame.at(c, bx + x, by + y) - 128.0;
          }
        }
        forward_dct(pix, coef);
        int idx[kCoeffs];
        for (int i = 0; i < kCoeffs; ++i) {
          idx[i] = static_cast<int>(std::lround(coef[i] / (i == 0 ? dc_step : ac_step)));
        }

        const int diff = idx[0] - prev_dc;
        prev_dc = idx[0];
        const int dc_size = size_of(diff);
        dc_model.encode(enc, c, dc_size);
        enc.encode_bits(bits_of(diff, dc_size), dc_size);

        int run = 0;
        for (int k = 1; k < kCoeffs; ++k) {
          const int v = idx[t.zigzag[k]];
          if (v == 0) {
            ++run;
            continue;
          }
          for (; run > 15; run -= 16) ac_model.encode(enc, c, kZrl);
          const int size = size_of(v);
          ac_model.encode(enc, c, (run << 4) | size);
          enc.encode_bits(bits_of(v, size), size);
          run = 0;
        }
        if (run > 0) ac_model.encode(enc, c, kEob);

        reconstruct_block(idx, dc_step, ac_step, result.reconstruction, c, bx, by);
      }
    }
  }
  result.bytes = enc.finish();
  return result;
}

Frame decode_key_frame(std::span<const uint8_t> bytes, int width, int height,
                       int qp) {
  check_args(width, height, qp);
  const Tables& t = tables();
  const double ac_step = quant_step(qp);
  const double dc_step = dc_quant_step(qp);

  RangeDecoder dec(bytes);
  AdaptiveModel dc_model(kDcAlphabet, kChannels);
  AdaptiveModel ac_model(kAcAlphabet, kChannels);
  Frame out(width, height);

  for (int c = 0; c < kChannels; ++c) {
    int prev_dc = 0;
    for (int by = 0; by < height; by += kBlock) {
      for (int bx = 0; bx < width; bx += kBlock) {
        int idx[kCoeffs] = {};
        const int dc_size = dc_model.decode(dec, c);
        prev_dc += value_of(dec.decode_bits(dc_size), dc_size);
        idx[0] = prev_dc;

        for (int k = 1; k < kCoeffs;) {
          const int sym = ac_model.decode(dec, c);
          const int run = sym >> 4;
          const int size = sym & 15;
          if (size == 0) {
            if (sym == kEob) break;
            if (sym != kZrl) throw DecodeError("key frame: invalid AC symbol");
            k += 16;
            if (k >= kCoeffs) throw DecodeError("key frame: zero run past block end");
            continue;
          }
          k += run;
          if (k >= kCoeffs) throw DecodeError("key frame: coefficient index past block end");
          idx[t.zigzag[k]] = value_of(dec.decode_bits(size), size);
          ++k;
        }
        reconstruct_block(idx, dc_step, ac_step, out, c, bx, by);
      }
    }
  }
  dec.finish();
  return out;
}

}  // namespace pgen
