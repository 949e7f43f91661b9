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

#include <cmath>

#include "doctest.h"
#include "pgen/errors.h"
#include "pgen/evaluation.h"
#include "pgen/intra_codec.h"
#include "pgen/synthetic.h"
#include "test_util.h"

namespace pgen {
namespace {

using testing::noise_frame;
using testing::textured_frame;

TEST_CASE("qp to step mapping") {
  CHECK(quant_step(4) == 1.0);
  CHECK(quant_step(10) == doctest::Approx(2.0));
  CHECK(quant_step(22) == doctest::Approx(8.0));
  CHECK(quant_step(52) == doctest::Approx(256.0));
  CHECK(quant_step(2) == 1.0);  // floored
  CHECK(dc_quant_step(52) == 8.0);
  CHECK(dc_quant_step(12) == doctest::Approx(std::exp2(8.0 / 6)));
}

TEST_CASE("constant frames survive every qp exactly") {
  for (int v : {0, 1, 77, 128, 200, 255}) {
    const Frame f(64, 48, static_cast<uint8_t>(v));
    for (int qp : kQpSet) {
      const IntraResult r = encode_key_frame(f, qp);
      CHECK(r.reconstruction == f);
      CHECK(decode_key_frame(r.bytes, 64, 48, qp) == f);
    }
  }
}

TEST_CASE("decoder reproduces the encoder reconstruction") {
  for (uint64_t seed = 0; seed < 3; ++seed) {
    for (const Frame& f : {textured_frame(64, 64, seed), noise_frame(32, 40, seed)}) {
      for (int qp : {0, 2, 4, 22, 37, 52, 63}) {
        const IntraResult r = encode_key_frame(f, qp);
        CHECK(decode_key_frame(r.bytes, f.width, f.height, qp) == r.reconstruction);
      }
    }
  }
}

TEST_CASE("rate falls and distortion grows along the qp ladder") {
  for (uint64_t seed = 0; seed < 4; ++seed) {
    SyntheticSpec spec;
    spec.frame_count = 2;
    spec.seed = seed;
    const Frame key = generate_synthetic_sequence(spec).video.frames[0];
    size_t prev_bytes = SIZE_MAX;
    double prev_mse = -1;
    for (int qp : kQpSet) {
      const IntraResult r = encode_key_frame(key, qp);
      const double e = mse(key, r.reconstruction);
      CHECK(r.bytes.size() < prev_bytes);
      CHECK(e >= prev_mse);
      prev_bytes = r.bytes.size();
      prev_mse = e;
    }
  }
}

TEST_CASE("qp 2 is near-lossless on smooth content") {
  for (uint64_t seed = 0; seed < 3; ++seed) {
    SyntheticSpec spec;
    spec.frame_count = 2;
    spec.seed = seed;
    const Frame key = generate_synthetic_sequence(spec).video.frames[0];
    CHECK(psnr(key, encode_key_frame(key, 2).reconstruction) >= 50.0);
  }
}

TEST_CASE("intra codec input validation and corruption") {
  CHECK_THROWS_AS(encode_key_frame(Frame(30, 32), 22), InvalidArgument);
  CHECK_THROWS_AS(encode_key_frame(Frame(32, 32), 64), InvalidArgument);

  const Frame f = textured_frame(64, 64, 1);
  const IntraResult r = encode_key_frame(f, 22);
  for (size_t cut : {size_t{0}, size_t{3}, r.bytes.size() / 2, r.bytes.size() - 1}) {
    const std::vector<uint8_t> part(r.bytes.begin(), r.bytes.begin() + cut);
    CHECK_THROWS_AS(decode_key_frame(part, 64, 64, 22), DecodeError);
  }
  // Random corruption may decode to garbage but must fail cleanly or succeed.
  SplitMix64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    auto bad = r.bytes;
    bad[rng.next() % bad.size()] ^= static_cast<uint8_t>(1 + rng.next() % 255);
    try {
      const Frame g = decode_key_frame(bad, 64, 64, 22);
      CHECK(g.valid());
    } catch (const DecodeError&) {
    }
  }
}

}  // namespace
}  // namespace pgen
