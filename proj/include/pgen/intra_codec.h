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

// Key-reference frame codec: 8x8 DCT per plane, uniform quantization driven
// by a QP, and JPEG-style run/size symbols through the adaptive range coder.

#ifndef PGEN_INTRA_CODEC_H_
#define PGEN_INTRA_CODEC_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "pgen/media.h"

namespace pgen {

// QP ladder used by the RD sweep.
constexpr std::array<int, 6> kQpSet = {2, 12, 22, 32, 42, 52};
constexpr int kDefaultQp = 22;
constexpr int kMaxQp = 63;

bool is_qp_in_set(int qp);

// AC step 2^((qp - 4) / 6), floored at 1.
double quant_step(int qp);
// DC step: the AC step capped at 8, so flat blocks survive every QP.
double dc_quant_step(int qp);

struct IntraResult {
  std::vector<uint8_t> bytes;
  Frame reconstruction;  // bit-identical to decode_key_frame(bytes, ...)
};

// Width and height must be multiples of 8; qp in [0, kMaxQp].
IntraResult encode_key_frame(const Frame& frame, int qp);
Frame decode_key_frame(std::span<const uint8_t> bytes, int width, int height,
                       int qp);

}  // namespace pgen

#endif  // PGEN_INTRA_CODEC_H_
