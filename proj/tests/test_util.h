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

#ifndef PGEN_TESTS_TEST_UTIL_H_
#define PGEN_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "pgen/media.h"
#include "pgen/synthetic.h"

namespace pgen::testing {

inline Frame noise_frame(int w, int h, uint64_t seed) {
  SplitMix64 rng(seed);
  Frame f(w, h);
  for (uint8_t& v : f.data) v = static_cast<uint8_t>(rng.next() >> 56);
  return f;
}

// Smooth color ramps plus a few sinusoids; deterministic in `seed`.
inline Frame textured_frame(int w, int h, uint64_t seed) {
  SplitMix64 rng(seed);
  const double fx = rng.uniform(0.03, 0.12), fy = rng.uniform(0.03, 0.12);
  const double ph = rng.uniform(0.0, 6.28);
  Frame f(w, h);
  for (int c = 0; c < kChannels; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double v = 60 + 40.0 * c + 50.0 * x / w + 30.0 * y / h +
                         30 * std::sin(fx * x * 6.283 + ph) * std::cos(fy * y * 6.283) +
                         10 * std::sin(0.7 * x + 0.3 * y);
        f.at(c, x, y) = static_cast<uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
      }
    }
  }
  return f;
}

inline Frame constant_frame(int w, int h, uint8_t v) { return Frame(w, h, v); }

}  // namespace pgen::testing

#endif  // PGEN_TESTS_TEST_UTIL_H_
