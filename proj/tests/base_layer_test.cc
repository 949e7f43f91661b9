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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "pgen/base_layer.h"
#include "pgen/errors.h"
#include "pgen/evaluation.h"
#include "pgen/intra_codec.h"
#include "pgen/synthetic.h"

namespace pgen {
namespace {

KeypointTrack random_track(int frames, int n, uint64_t seed, double jump = 0.01) {
  SplitMix64 rng(seed);
  KeypointTrack t;
  KeypointSet cur;
  for (int k = 0; k < n; ++k) cur.points.push_back({rng.uniform(), rng.uniform()});
  for (int l = 0; l < frames; ++l) {
    t.frames.push_back(cur);
    for (Keypoint& p : cur.points) {
      p.x = std::clamp(p.x + rng.uniform(-jump, jump), 0.0, 1.0);
      p.y = std::clamp(p.y + rng.uniform(-jump, jump), 0.0, 1.0);
    }
  }
  return t;
}

// Bits of an all-zero residual stream: each of the two axis contexts codes
// frames x N zeros under a fresh alphabet-32 model.
double zero_stream_bits(int symbols_per_context) {
  double bits = 0;
  uint32_t zero = 1, total = 32;
  for (int i = 0; i < symbols_per_context; ++i) {
    bits -= std::log2(static_cast<double>(zero) / total);
    ++zero;
    if (++total > (1u << 13)) {
      zero = std::max(1u, zero / 2);
      total = zero + 31;
    }
  }
  return 2 * bits;
}

TEST_CASE("analyze returns the oracle keypoints") {
  SyntheticSpec spec;
  spec.frame_count = 5;
  const SyntheticSequence s = generate_synthetic_sequence(spec);
  for (int l = 0; l < 5; ++l) CHECK(analyze(l, s.track) == s.track.frames[l]);
  CHECK(analyze(0, s.track).size() == 10);
  CHECK_THROWS_AS(analyze(5, s.track), InvalidArgument);
  CHECK_THROWS_AS(analyze(-1, s.track), InvalidArgument);
}

TEST_CASE("keypoint quantizer half-step bound") {
  KeypointSet set;
  set.points.push_back({0.5, 0.25});
  const auto q = quantize_keypoints(set, kDefaultQstep);
  const KeypointSet back = dequantize_keypoints(q, kDefaultQstep);
  CHECK(std::abs(back.points[0].x - 0.5) <= 1.0 / 512);
  CHECK(std::abs(back.points[0].y - 0.25) <= 1.0 / 512);
}

TEST_CASE("parameter coding is closed loop and drift free") {
  for (uint64_t seed = 0; seed < 6; ++seed) {
    for (double qstep : {1.0 / 1024, kDefaultQstep, 1.0 / 37}) {
      const KeypointTrack t = random_track(60, 1 + static_cast<int>(seed % 10), seed);
      const ParamStream p = encode_params(t, qstep);
      const KeypointTrack d = decode_params(p.bytes, p.key_indices, 60, qstep);
      CHECK(d == p.reconstruction);
      for (size_t l = 0; l < t.frames.size(); ++l) {
        for (size_t k = 0; k < t.keypoint_count(); ++k) {
          CHECK(std::abs(d.frames[l].points[k].x - t.frames[l].points[k].x) <=
                qstep / 2 + 1e-12);
          CHECK(std::abs(d.frames[l].points[k].y - t.frames[l].points[k].y) <=
                qstep / 2 + 1e-12);
        }
      }
      REQUIRE(p.frame_ends.size() == 59);
      CHECK(std::is_sorted(p.frame_ends.begin(), p.frame_ends.end()));
      CHECK(p.frame_ends.back() == p.bytes.size());
    }
  }
}

TEST_CASE("large jumps use the escape path") {
  KeypointTrack t;
  t.frames.push_back({{{0.0, 1.0}, {0.5, 0.5}}});
  t.frames.push_back({{{1.0, 0.0}, {0.5, 0.5}}});
  t.frames.push_back({{{0.0, 1.0}, {0.51, 0.49}}});
  const ParamStream p = encode_params(t, 1.0 / 65536);
  CHECK(decode_params(p.bytes, p.key_indices, 3, 1.0 / 65536) == p.reconstruction);
}

TEST_CASE("static track costs almost nothing") {
  const int frames = 250;
  const int n = 10;
  KeypointTrack t = random_track(1, n, 3);
  t.frames.resize(frames, t.frames[0]);
  const ParamStream p = encode_params(t, kDefaultQstep);
  const KeypointTrack d = decode_params(p.bytes, p.key_indices, frames, kDefaultQstep);
  for (const KeypointSet& s : d.frames) CHECK(s == d.frames[0]);
  const double bits = zero_stream_bits((frames - 1) * n);
  CHECK(p.bytes.size() * 8.0 <= bits + 64);
  CHECK(p.bytes.size() <= 5 + std::ceil(bits / 8));
  // Far under 1 kbps at 25 fps.
  CHECK(p.bytes.size() * 8.0 * 25 / frames / 1000 < 1.0);
}

TEST_CASE("parameter decoding errors") {
  const KeypointTrack t = random_track(20, 4, 9);
  const ParamStream p = encode_params(t, kDefaultQstep);
  const std::vector<uint8_t> part(p.bytes.begin(), p.bytes.end() - 1);
  CHECK_THROWS_AS(decode_params(part, p.key_indices, 20, kDefaultQstep), DecodeError);
  CHECK_THROWS_AS(encode_params(KeypointTrack{}, kDefaultQstep), InvalidArgument);
  CHECK_THROWS_AS(encode_params(t, 0.0), InvalidArgument);
  KeypointTrack ragged = t;
  ragged.frames[3].points.pop_back();
  CHECK_THROWS_AS(encode_params(ragged, kDefaultQstep), InvalidArgument);
}

TEST_CASE("dense motion closed forms") {
  KeypointSet ref, cur;
  ref.points.push_back({0.5, 0.5});
  cur.points.push_back({0.5, 0.5});
  MotionField m = dense_motion_from_keypoints(ref, cur, 24, 65, 65);
  for (double v : m.dx) CHECK(v == 0.0);

  m = dense_motion_from_keypoints(KeypointSet{}, KeypointSet{}, 24, 16, 16);
  for (double v : m.dy) CHECK(v == 0.0);

  // One keypoint at pixel (32, 32) of a 65x65 frame, displaced by (5, 0).
  ref.points[0] = {37.0 / 64, 0.5};
  m = dense_motion_from_keypoints(ref, cur, 24, 65, 65);
  const double expected = 5.0 / (1.0 + std::exp(-2.0));
  CHECK(m.dx[32 * 65 + 32] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(4.40).epsilon(0.001));
  CHECK(m.dy[32 * 65 + 32] == doctest::Approx(0.0));

  cur.points.push_back({0.1, 0.1});
  CHECK_THROWS_AS(dense_motion_from_keypoints(ref, cur, 24, 65, 65), InvalidArgument);
  CHECK_THROWS_AS(dense_motion_from_keypoints(ref, ref, 0, 65, 65), InvalidArgument);
}

TEST_CASE("synthesis with identical keypoints returns the key frame") {
  SyntheticSpec spec;
  spec.frame_count = 2;
  const SyntheticSequence s = generate_synthetic_sequence(spec);
  const KeypointSet& kp = s.track.frames[0];
  CHECK(synthesize_base(s.video.frames[0], kp, kp, 24) == s.video.frames[0]);
}

TEST_CASE("matched-kernel synthesis is accurate") {
  // Same kernel as the generator, lossless key frame, unquantized keypoints.
  for (uint64_t seed = 1; seed <= 3; ++seed) {
    SyntheticSpec spec;
    spec.frame_count = 12;
    spec.seed = seed;
    spec.kernel_bandwidth = kDefaultTau;
    const SyntheticSequence s = generate_synthetic_sequence(spec);
    for (int l = 1; l < 12; ++l) {
      const Frame b = synthesize_base(s.video.frames[0], s.track.frames[0],
                                      s.track.frames[l], kDefaultTau);
      CHECK(psnr(b, s.video.frames[l]) >= 40.0);
    }
  }
}

TEST_CASE("coarser keypoint quantization does not improve the base layer") {
  SyntheticSpec spec;
  spec.frame_count = 16;
  spec.seed = 4;
  const SyntheticSequence s = generate_synthetic_sequence(spec);
  const Frame key = encode_key_frame(s.video.frames[0], 22).reconstruction;
  double prev = 1e9;
  for (double qstep : {1.0 / 1024, 1.0 / 256, 1.0 / 64, 1.0 / 16}) {
    const ParamStream p = encode_params(s.track, qstep);
    std::vector<double> q;
    for (int l = 1; l < 16; ++l) {
      q.push_back(psnr(synthesize_base(key, p.reconstruction.frames[0],
                                       p.reconstruction.frames[l], kDefaultTau),
                       s.video.frames[l]));
    }
    std::nth_element(q.begin(), q.begin() + q.size() / 2, q.end());
    const double median = q[q.size() / 2];
    CHECK(median <= prev + 1e-9);
    prev = median;
  }
}

}  // namespace
}  // namespace pgen
