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
#include "pgen/synthetic.h"
#include "test_util.h"

namespace pgen {
namespace {

using testing::textured_frame;

// log10(rate) as a cubic in quality.
struct Cubic {
  double c[4];
  double operator()(double q) const { return c[0] + q * (c[1] + q * (c[2] + q * c[3])); }
};

RDCurve sample(const Cubic& f, std::vector<double> qualities) {
  RDCurve curve{"psnr", {}};
  for (double q : qualities) curve.points.push_back({std::pow(10.0, f(q)), q});
  return curve;
}

// Average of 10^(f - g) - 1 in the log domain, by dense midpoint integration.
double dense_bd(const Cubic& f, const Cubic& g, double lo, double hi) {
  const int n = 200000;
  double acc = 0;
  for (int i = 0; i < n; ++i) {
    const double q = lo + (hi - lo) * (i + 0.5) / n;
    acc += f(q) - g(q);
  }
  return (std::pow(10.0, acc / n) - 1.0) * 100.0;
}

TEST_CASE("psnr examples") {
  const Frame a = textured_frame(32, 32, 1);
  CHECK(psnr(a, a) == kPsnrCap);
  Frame b = a;
  for (uint8_t& v : b.data) v = v < 255 ? v + 1 : v - 1;
  CHECK(mse(a, b) == 1.0);
  CHECK(psnr(a, b) == doctest::Approx(48.1308).epsilon(1e-5));
  CHECK(psnr(Frame(8, 8, 0), Frame(8, 8, 255)) == doctest::Approx(0.0));
  CHECK_THROWS_AS(psnr(a, Frame(16, 16)), InvalidArgument);
  VideoSequence sa{{a, a}, 25}, sb{{a, b}, 25};
  CHECK(psnr(sa, sb) == doctest::Approx((99.0 + 48.1308) / 2).epsilon(1e-5));
}

TEST_CASE("ssim examples") {
  const Frame a = textured_frame(48, 48, 2);
  CHECK(ssim(a, a) == doctest::Approx(1.0));
  Frame inv = a;
  for (uint8_t& v : inv.data) v = 255 - v;
  CHECK(ssim(a, inv) < 0.0);
  CHECK(ssim(Frame(16, 16, 90), Frame(16, 16, 90)) == doctest::Approx(1.0));
  Frame noisy = a;
  SplitMix64 rng(3);
  for (uint8_t& v : noisy.data) v = static_cast<uint8_t>(std::clamp(v + rng.uniform(-20, 20), 0.0, 255.0));
  const double s = ssim(a, noisy);
  CHECK(s < 1.0);
  CHECK(s > 0.0);
  CHECK_THROWS_AS(ssim(Frame(8, 8), Frame(8, 8)), InvalidArgument);
}

TEST_CASE("rate and cost") {
  CHECK(bitrate_kbps(1000, 25, 25.0) == doctest::Approx(1.0));
  CHECK(bitrate_kbps(8 * 1024, 50, 25.0) == doctest::Approx(4.096));
  CHECK_THROWS_AS(bitrate_kbps(8, 0, 25.0), InvalidArgument);
  CHECK(rd_cost(10.0, 2.0, 3.0) == doctest::Approx(16.0));
  CHECK(rd_cost(10.0, 2.0, 0.0) == doctest::Approx(10.0));
  CHECK_THROWS_AS(rd_cost(1.0, 1.0, -1.0), InvalidArgument);
}

TEST_CASE("bd-rate simple cases") {
  const RDCurve anchor{"psnr", {{100, 30}, {200, 33}, {400, 36}, {800, 39}}};
  CHECK(bd_rate(anchor, anchor) == doctest::Approx(0.0));
  RDCurve doubled = anchor;
  for (RDPoint& p : doubled.points) p.rate_kbps *= 2;
  CHECK(bd_rate(doubled, anchor) == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(bd_rate(anchor, doubled) == doctest::Approx(-50.0).epsilon(1e-9));

  RDCurve three = anchor;
  three.points.pop_back();
  CHECK_THROWS_AS(bd_rate(three, anchor), InvalidArgument);
  RDCurve apart{"psnr", {{100, 50}, {200, 53}, {400, 56}, {800, 59}}};
  CHECK_THROWS_AS(bd_rate(apart, anchor), InvalidArgument);
  RDCurve bad = anchor;
  bad.points[2].rate_kbps = 150;
  CHECK_THROWS_AS(validate(bad), InvalidArgument);
  bad.points[2].rate_kbps = -1;
  CHECK_THROWS_AS(validate(bad), InvalidArgument);
}

TEST_CASE("bd-rate matches dense integration of the underlying curves") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    // Increasing cubics over [25, 45]: positive slope plus a small bend.
    auto make = [&] {
      Cubic f;
      const double q0 = 35;
      const double a = rng.uniform(1.5, 3.0), b = rng.uniform(0.05, 0.09);
      const double c = rng.uniform(-0.001, 0.001), d = rng.uniform(0.0, 0.0002);
      // Expand a + b(q-q0) + c(q-q0)^2 + d(q-q0)^3 into powers of q.
      f.c[0] = a - b * q0 + c * q0 * q0 - d * q0 * q0 * q0;
      f.c[1] = b - 2 * c * q0 + 3 * d * q0 * q0;
      f.c[2] = c - 3 * d * q0;
      f.c[3] = d;
      return f;
    };
    const Cubic f = make(), g = make();
    const double t_lo = rng.uniform(25, 29), t_hi = rng.uniform(40, 45);
    const double a_lo = rng.uniform(25, 29), a_hi = rng.uniform(40, 45);
    std::vector<double> tq, aq;
    for (int i = 0; i < 6; ++i) {
      tq.push_back(t_lo + (t_hi - t_lo) * i / 5.0);
      aq.push_back(a_lo + (a_hi - a_lo) * i / 5.0);
    }
    const RDCurve t = sample(f, tq), a = sample(g, aq);
    const double expected =
        dense_bd(f, g, std::max(t_lo, a_lo), std::min(t_hi, a_hi));
    CHECK(std::abs(bd_rate(t, a) - expected) <= 0.1);
    // Reciprocity: the two directions compose to no change.
    CHECK((1 + bd_rate(t, a) / 100) * (1 + bd_rate(a, t) / 100) ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("report formats") {
  std::vector<ReportRow> rows = {{"seq1", "qp22", "base+8", 12.5, 30.25, 0.912345678, 44.0},
                                 {"a,b", "q\"x", "base", 1, 2, 0.5, 3}};
  CHECK(emit_report(rows) ==
        "sequence,config,layer_set,rate_kbps,psnr_db,ssim,rd_cost\n"
        "seq1,qp22,base+8,12.5000,30.2500,0.912346,44.0000\n"
        "\"a,b\",\"q\"\"x\",base,1.0000,2.0000,0.500000,3.0000\n");
  CHECK(emit_report({}) == "sequence,config,layer_set,rate_kbps,psnr_db,ssim,rd_cost\n");
  const RDCurve c{"ssim", {{1.5, 0.9}, {3, 0.95}}};
  CHECK(emit_rd_curve(c) == "# rate_kbps ssim\n1.500000 0.900000\n3.000000 0.950000\n");
}

}  // namespace
}  // namespace pgen
