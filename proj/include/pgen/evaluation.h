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

// Quality metrics, rate accounting, and Bjontegaard-delta comparison of
// rate-distortion curves.

#ifndef PGEN_EVALUATION_H_
#define PGEN_EVALUATION_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pgen/media.h"

namespace pgen {

constexpr double kPsnrCap = 99.0;

double mse(const Frame& a, const Frame& b);
// RGB PSNR; identical frames give kPsnrCap.
double psnr(const Frame& a, const Frame& b);
// Mean of per-frame PSNR values.
double psnr(const VideoSequence& a, const VideoSequence& b);

// Luminance SSIM: 11x11 Gaussian window (sigma 1.5), mean over valid windows.
double ssim(const Frame& a, const Frame& b);
double ssim(const VideoSequence& a, const VideoSequence& b);

double bitrate_kbps(uint64_t total_bits, int frame_count, double fps);

// D + lambda * R.
double rd_cost(double distortion, double rate, double lambda);

struct RDPoint {
  double rate_kbps = 0;
  double quality = 0;
};

struct RDCurve {
  std::string metric;
  std::vector<RDPoint> points;  // strictly increasing rate
};

// Throws InvalidArgument if the curve has non-positive or non-increasing
// rates or non-finite quality.
void validate(const RDCurve& curve);

// Average rate difference (percent) of `test` against `anchor` at equal
// quality: cubic fits of log10(rate) over quality, integrated over the
// overlapping quality range. Negative means `test` needs fewer bits.
double bd_rate(const RDCurve& test, const RDCurve& anchor);

struct ReportRow {
  std::string sequence;
  std::string config;
  std::string layer_set;
  double rate_kbps = 0;
  double psnr_db = 0;
  double ssim = 0;
  double rd_cost = 0;
};

// CSV with header sequence,config,layer_set,rate_kbps,psnr_db,ssim,rd_cost.
std::string emit_report(const std::vector<ReportRow>& rows);

// Two whitespace-separated columns (rate, quality), one point per line.
std::string emit_rd_curve(const RDCurve& curve);

}  // namespace pgen

#endif  // PGEN_EVALUATION_H_
