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

#include "pgen/evaluation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include <Eigen/Dense>

#include "pgen/errors.h"

namespace pgen {

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimC1 = (0.01 * 255) * (0.01 * 255);
constexpr double kSsimC2 = (0.03 * 255) * (0.03 * 255);

void check_same(const Frame& a, const Frame& b) {
  if (a.width != b.width || a.height != b.height || !a.valid() || !b.valid()) {
    throw InvalidArgument("metric: frame dimensions differ");
  }
}

void check_same(const VideoSequence& a, const VideoSequence& b) {
  if (a.frames.size() != b.frames.size() || a.frames.empty()) {
    throw InvalidArgument("metric: sequence lengths differ or are empty");
  }
}

// Valid-mode separable filtering with a 1-D kernel.
std::vector<double> filter_valid(const std::vector<double>& in, int w, int h,
                                 const std::vector<double>& k) {
  const int n = static_cast<int>(k.size());
  const int ow = w - n + 1;
  const int oh = h - n + 1;
  std::vector<double> tmp(static_cast<size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0;
      for (int i = 0; i < n; ++i) acc += k[i] * in[static_cast<size_t>(y) * w + x + i];
      tmp[static_cast<size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0;
      for (int i = 0; i < n; ++i) acc += k[i] * tmp[static_cast<size_t>(y + i) * ow + x];
      out[static_cast<size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

struct CubicFit {
  double center = 0;
  double scale = 1;
  Eigen::Vector4d c;  // in t = (q - center) / scale

  // Integral of the fitted polynomial over q in [lo, hi].
  double integrate(double lo, double hi) const {
    auto prim = [&](double q) {
      const double t = (q - center) / scale;
      return c[0] * t + c[1] * t * t / 2 + c[2] * t * t * t / 3 + c[3] * t * t * t * t / 4;
    };
    return scale * (prim(hi) - prim(lo));
  }
};

CubicFit fit_log_rate(const RDCurve& curve) {
  const size_t n = curve.points.size();
  double lo = curve.points[0].quality;
  double hi = lo;
  for (const RDPoint& p : curve.points) {
    lo = std::min(lo, p.quality);
    hi = std::max(hi, p.quality);
  }
  CubicFit fit;
  fit.center = 0.5 * (lo + hi);
  fit.scale = hi > lo ? 0.5 * (hi - lo) : 1.0;
  Eigen::MatrixXd a(n, 4);
  Eigen::VectorXd b(n);
  for (size_t i = 0; i < n; ++i) {
    const double t = (curve.points[i].quality - fit.center) / fit.scale;
    a(i, 0) = 1;
    a(i, 1) = t;
    a(i, 2) = t * t;
    a(i, 3) = t * t * t;
    b(i) = std::log10(curve.points[i].rate_kbps);
  }
  fit.c = a.colPivHouseholderQr().solve(b);
  return fit;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string number(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace

double mse(const Frame& a, const Frame& b) {
  check_same(a, b);
  uint64_t acc = 0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    const int d = static_cast<int>(a.data[i]) - b.data[i];
    acc += static_cast<uint64_t>(d * d);
  }
  return static_cast<double>(acc) / a.data.size();
}

double psnr(const Frame& a, const Frame& b) {
  const double e = mse(a, b);
  if (e == 0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / e));
}

double psnr(const VideoSequence& a, const VideoSequence& b) {
  check_same(a, b);
  double sum = 0;
  for (size_t i = 0; i < a.frames.size(); ++i) sum += psnr(a.frames[i], b.frames[i]);
  return sum / a.frames.size();
}

double ssim(const Frame& a, const Frame& b) {
  check_same(a, b);
  if (a.width < kSsimWindow || a.height < kSsimWindow) {
    throw InvalidArgument("ssim: frame smaller than the 11x11 window");
  }
  std::vector<double> k(kSsimWindow);
  double ksum = 0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = i - kSsimWindow / 2;
    k[i] = std::exp(-d * d / (2 * kSsimSigma * kSsimSigma));
    ksum += k[i];
  }
  for (double& v : k) v /= ksum;

  const std::vector<double> x = luminance(a);
  const std::vector<double> y = luminance(b);
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const int w = a.width;
  const int h = a.height;
  const auto mx = filter_valid(x, w, h, k);
  const auto my = filter_valid(y, w, h, k);
  const auto sxx = filter_valid(xx, w, h, k);
  const auto syy = filter_valid(yy, w, h, k);
  const auto sxy = filter_valid(xy, w, h, k);
  double sum = 0;
  for (size_t i = 0; i < mx.size(); ++i) {
    const double vx = sxx[i] - mx[i] * mx[i];
    const double vy = syy[i] - my[i] * my[i];
    const double cxy = sxy[i] - mx[i] * my[i];
    sum += ((2 * mx[i] * my[i] + kSsimC1) * (2 * cxy + kSsimC2)) /
           ((mx[i] * mx[i] + my[i] * my[i] + kSsimC1) * (vx + vy + kSsimC2));
  }
  return sum / mx.size();
}

double ssim(const VideoSequence& a, const VideoSequence& b) {
  check_same(a, b);
  double sum = 0;
  for (size_t i = 0; i < a.frames.size(); ++i) sum += ssim(a.frames[i], b.frames[i]);
  return sum / a.frames.size();
}

double bitrate_kbps(uint64_t total_bits, int frame_count, double fps) {
  if (frame_count <= 0) throw InvalidArgument("bitrate: frame_count must be > 0");
  return static_cast<double>(total_bits) * fps / frame_count / 1000.0;
}

double rd_cost(double distortion, double rate, double lambda) {
  if (!(lambda >= 0)) throw InvalidArgument("rd_cost: lambda must be >= 0");
  return distortion + lambda * rate;
}

void validate(const RDCurve& curve) {
  for (size_t i = 0; i < curve.points.size(); ++i) {
    const RDPoint& p = curve.points[i];
    if (!(p.rate_kbps > 0) || !std::isfinite(p.rate_kbps) || !std::isfinite(p.quality)) {
      throw InvalidArgument("RD point needs positive rate and finite quality");
    }
    if (i > 0 && !(p.rate_kbps > curve.points[i - 1].rate_kbps)) {
      throw InvalidArgument("RD curve rates must strictly increase");
    }
  }
}

double bd_rate(const RDCurve& test, const RDCurve& anchor) {
  if (test.points.size() < 4 || anchor.points.size() < 4) {
    throw InvalidArgument("bd_rate: each curve needs at least 4 points");
  }
  validate(test);
  validate(anchor);
  auto range = [](const RDCurve& c) {
    double lo = c.points[0].quality, hi = lo;
    for (const RDPoint& p : c.points) {
      lo = std::min(lo, p.quality);
      hi = std::max(hi, p.quality);
    }
    return std::pair{lo, hi};
  };
  const auto [tlo, thi] = range(test);
  const auto [alo, ahi] = range(anchor);
  const double lo = std::max(tlo, alo);
  const double hi = std::min(thi, ahi);
  if (!(hi > lo)) throw InvalidArgument("bd_rate: quality ranges do not overlap");

  const double delta =
      (fit_log_rate(test).integrate(lo, hi) - fit_log_rate(anchor).integrate(lo, hi)) /
      (hi - lo);
  return (std::pow(10.0, delta) - 1.0) * 100.0;
}

std::string emit_report(const std::vector<ReportRow>& rows) {
  std::string out = "sequence,config,layer_set,rate_kbps,psnr_db,ssim,rd_cost\n";
  for (const ReportRow& r : rows) {
    out += csv_field(r.sequence) + "," + csv_field(r.config) + "," + csv_field(r.layer_set) +
           "," + number(r.rate_kbps, "%.4f") + "," + number(r.psnr_db, "%.4f") + "," +
           number(r.ssim, "%.6f") + "," + number(r.rd_cost, "%.4f") + "\n";
  }
  return out;
}

std::string emit_rd_curve(const RDCurve& curve) {
  std::string out = "# rate_kbps " + curve.metric + "\n";
  for (const RDPoint& p : curve.points) {
    out += number(p.rate_kbps, "%.6f") + " " + number(p.quality, "%.6f") + "\n";
  }
  return out;
}

}  // namespace pgen
