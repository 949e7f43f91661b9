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

#include "pgen/entropy.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pgen/errors.h"

namespace pgen {

namespace {

constexpr uint32_t kTopValue = 1u << 24;

}  // namespace

// ---------------------------------------------------------------------------
// RangeEncoder

void RangeEncoder::emit(uint8_t b) {
  if (leading_byte_) {
    // The first cached byte can never receive a carry: low + range never
    // exceeds the initial 2^32 bound.
    assert(b == 0);
    leading_byte_ = false;
    return;
  }
  out_.push_back(b);
}

void RangeEncoder::shift_low() {
  if (static_cast<uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    const uint8_t carry = static_cast<uint8_t>(low_ >> 32);
    uint8_t temp = cache_;
    do {
      emit(static_cast<uint8_t>(temp + carry));
      temp = 0xFF;
    } while (--pending_ != 0);
    cache_ = static_cast<uint8_t>(low_ >> 24);
  }
  ++pending_;
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

void RangeEncoder::encode(uint32_t cum, uint32_t freq, uint32_t total) {
  assert(total > 0 && total <= kMaxCoderTotal);
  assert(freq > 0 && cum + freq <= total);
  const uint32_t r = range_ / total;
  low_ += static_cast<uint64_t>(r) * cum;
  range_ = r * freq;
  while (range_ < kTopValue) {
    range_ <<= 8;
    shift_low();
  }
}

void RangeEncoder::encode_bits(uint32_t value, int nbits) {
  assert(nbits >= 0 && nbits <= 32);
  while (nbits > 0) {
    const int chunk = std::min(nbits, 16);
    nbits -= chunk;
    const uint32_t part = (value >> nbits) & ((1u << chunk) - 1);
    encode(part, 1, 1u << chunk);
  }
}

std::vector<uint8_t> RangeEncoder::finish() {
  for (int i = 0; i < 5; ++i) shift_low();
  return std::move(out_);
}

// ---------------------------------------------------------------------------
// RangeDecoder

RangeDecoder::RangeDecoder(std::span<const uint8_t> bytes) : in_(bytes) {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
}

uint8_t RangeDecoder::next_byte() {
  if (pos_ >= in_.size()) throw DecodeError("entropy payload exhausted");
  return in_[pos_++];
}

void RangeDecoder::normalize() {
  while (range_ < kTopValue) {
    code_ = (code_ << 8) | next_byte();
    range_ <<= 8;
  }
}

uint32_t RangeDecoder::decode_freq(uint32_t total) {
  assert(total > 0 && total <= kMaxCoderTotal);
  step_ = range_ / total;
  const uint32_t v = code_ / step_;
  return std::min(v, total - 1);
}

void RangeDecoder::consume(uint32_t cum, uint32_t freq) {
  code_ -= step_ * cum;
  range_ = step_ * freq;
  // A well-formed stream keeps the code value inside the current interval.
  if (code_ >= range_) throw DecodeError("corrupt entropy payload");
  normalize();
}

uint32_t RangeDecoder::decode_bits(int nbits) {
  uint32_t value = 0;
  while (nbits > 0) {
    const int chunk = std::min(nbits, 16);
    nbits -= chunk;
    const uint32_t part = decode_freq(1u << chunk);
    consume(part, 1);
    value = (value << chunk) | part;
  }
  return value;
}

void RangeDecoder::finish() const {
  if (pos_ != in_.size()) {
    throw DecodeError("entropy payload has " + std::to_string(in_.size() - pos_) +
                      " unconsumed bytes");
  }
}

// ---------------------------------------------------------------------------
// AdaptiveModel

AdaptiveModel::AdaptiveModel(int alphabet_size, int context_count)
    : alphabet_(alphabet_size), contexts_(context_count) {
  if (alphabet_size < 1 || alphabet_size > kMaxAlphabet) {
    throw InvalidArgument("AdaptiveModel: alphabet size out of range");
  }
  if (context_count < 1) throw InvalidArgument("AdaptiveModel: need >= 1 context");
  counts_.assign(static_cast<size_t>(alphabet_) * contexts_, 1);
  totals_.assign(contexts_, static_cast<uint32_t>(alphabet_));
}

void AdaptiveModel::check(int ctx, int symbol) const {
  if (ctx < 0 || ctx >= contexts_) throw InvalidArgument("AdaptiveModel: bad context");
  if (symbol < 0 || symbol >= alphabet_) {
    throw InvalidArgument("symbol " + std::to_string(symbol) +
                          " outside alphabet of size " + std::to_string(alphabet_));
  }
}

uint32_t AdaptiveModel::cumulative(int ctx, int symbol) const {
  const auto c = counts(ctx);
  uint32_t cum = 0;
  for (int s = 0; s < symbol; ++s) cum += c[s];
  return cum;
}

double AdaptiveModel::cost_bits(int ctx, int symbol) const {
  check(ctx, symbol);
  return -std::log2(static_cast<double>(freq(ctx, symbol)) / total(ctx));
}

void AdaptiveModel::update(int ctx, int symbol) {
  uint16_t* c = counts_.data() + static_cast<size_t>(ctx) * alphabet_;
  ++c[symbol];
  if (++totals_[ctx] > kRescaleThreshold) {
    uint32_t t = 0;
    for (int s = 0; s < alphabet_; ++s) {
      c[s] = static_cast<uint16_t>(std::max(1, c[s] >> 1));
      t += c[s];
    }
    totals_[ctx] = t;
  }
}

void AdaptiveModel::encode(RangeEncoder& enc, int ctx, int symbol) {
  check(ctx, symbol);
  enc.encode(cumulative(ctx, symbol), freq(ctx, symbol), total(ctx));
  update(ctx, symbol);
}

int AdaptiveModel::decode(RangeDecoder& dec, int ctx) {
  check(ctx, 0);
  const uint32_t target = dec.decode_freq(total(ctx));
  const auto c = counts(ctx);
  uint32_t cum = 0;
  int s = 0;
  while (cum + c[s] <= target) cum += c[s++];
  dec.consume(cum, c[s]);
  update(ctx, s);
  return s;
}

// ---------------------------------------------------------------------------
// Gaussian model

namespace {

// erfc(x) for x >= 0 in the A&S 7.1.26 form: poly(t) * exp(-x^2).
double erfc_positive(double x) {
  constexpr double p = 0.3275911;
  constexpr double a1 = 0.254829592;
  constexpr double a2 = -0.284496736;
  constexpr double a3 = 1.421413741;
  constexpr double a4 = -1.453152027;
  constexpr double a5 = 1.061405429;
  const double t = 1.0 / (1.0 + p * x);
  const double poly = t * (a1 + t * (a2 + t * (a3 + t * (a4 + t * a5))));
  return poly * std::exp(-x * x);
}

// P(Z > z) for z >= 0.
double upper_tail(double z) {
  return 0.5 * erfc_positive(z / std::numbers::sqrt2);
}

// P(a < Z < b) with tails evaluated on the small side, so symmetric intervals
// give bit-identical results.
// ta and tb are upper_tail(|a|) and upper_tail(|b|), 0 for infinite ends.
double interval_from_tails(double a, double b, double ta, double tb) {
  double m;
  if (a >= 0) {
    m = ta - tb;
  } else if (b <= 0) {
    m = tb - ta;
  } else {
    m = 1.0 - ta - tb;
  }
  return std::max(m, 0.0);
}

double tail_of(double z) { return std::isinf(z) ? 0.0 : upper_tail(std::abs(z)); }

double standard_interval(double a, double b) {
  return interval_from_tails(a, b, tail_of(a), tail_of(b));
}

double bin_mass(double mu, double sigma, int k) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double lo = k - 0.5;
  double hi = k + 0.5;
  if (k < -kGaussianBinRange) {
    lo = -kInf;
    hi = -kGaussianBinRange - 0.5;
  } else if (k > kGaussianBinRange) {
    lo = kGaussianBinRange + 0.5;
    hi = kInf;
  }
  return standard_interval((lo - mu) / sigma, (hi - mu) / sigma);
}

// Beyond this many standard deviations a bin's mass is below 2^-100 and its
// fixed-point frequency is exactly the floor of 1.
constexpr double kWindowSigmas = 12.0;

}  // namespace

double erf_approx(double x) {
  return x >= 0 ? 1.0 - erfc_positive(x) : erfc_positive(-x) - 1.0;
}

double normal_cdf(double z) {
  return z >= 0 ? 1.0 - upper_tail(z) : upper_tail(-z);
}

double gaussian_bin_mass(double mu, double sigma, int k) {
  return bin_mass(mu, std::max(sigma, kSigmaFloor), k);
}

GaussianBinModel::GaussianBinModel(double mu, double sigma)
    : mu_(mu), sigma_(std::max(sigma, kSigmaFloor)) {
  if (!std::isfinite(mu) || !std::isfinite(sigma)) {
    throw InvalidArgument("GaussianBinModel: non-finite parameters");
  }
  constexpr uint32_t kSpread = kMaxCoderTotal - kBins;
  freq_.assign(kBins, 1);

  freq_[kLowEscape] += static_cast<uint32_t>(
      std::floor(bin_mass(mu_, sigma_, -kGaussianBinRange - 1) * kSpread));
  freq_[kHighEscape] += static_cast<uint32_t>(
      std::floor(bin_mass(mu_, sigma_, kGaussianBinRange + 1) * kSpread));

  const double reach = kWindowSigmas * sigma_ + 1.0;
  const int lo = std::max(-kGaussianBinRange, static_cast<int>(std::floor(mu_ - reach)));
  const int hi = std::min(kGaussianBinRange, static_cast<int>(std::ceil(mu_ + reach)));
  // Each interior edge is shared by two bins; evaluate its tail once.
  double a = (lo - 0.5 - mu_) / sigma_;
  double ta = tail_of(a);
  for (int k = lo; k <= hi; ++k) {
    const double b = (k + 0.5 - mu_) / sigma_;
    const double tb = tail_of(b);
    freq_[index_of(k)] +=
        static_cast<uint32_t>(std::floor(interval_from_tails(a, b, ta, tb) * kSpread));
    a = b;
    ta = tb;
  }

  uint32_t sum = 0;
  for (uint32_t f : freq_) sum += f;
  assert(sum <= kMaxCoderTotal);
  // Rounding slack goes to the bin holding mu, the most probable one.
  const double mode = std::clamp(std::floor(mu_ + 0.5), -kGaussianBinRange - 1.0,
                                 kGaussianBinRange + 1.0);
  freq_[index_of(static_cast<int>(mode))] += kMaxCoderTotal - sum;

  cum_.resize(kBins + 1);
  cum_[0] = 0;
  for (int i = 0; i < kBins; ++i) cum_[i + 1] = cum_[i] + freq_[i];
}

int GaussianBinModel::index_of(int value) {
  if (value < -kGaussianBinRange) return kLowEscape;
  if (value > kGaussianBinRange) return kHighEscape;
  return value + kGaussianBinRange + 1;
}

double GaussianBinModel::cost_bits(int value) const {
  const int idx = index_of(value);
  double bits = -std::log2(static_cast<double>(freq_[idx]) / kMaxCoderTotal);
  if (idx == kLowEscape || idx == kHighEscape) bits += kEscapeLiteralBits;
  return bits;
}

void GaussianBinModel::encode(RangeEncoder& enc, int value) const {
  const int idx = index_of(value);
  uint32_t literal = 0;
  if (idx == kLowEscape || idx == kHighEscape) {
    const int64_t excess = std::abs(static_cast<int64_t>(value)) - kGaussianBinRange - 1;
    if (excess >= (int64_t{1} << kEscapeLiteralBits)) {
      throw InvalidArgument("symbol " + std::to_string(value) +
                            " outside the escape-coded range");
    }
    literal = static_cast<uint32_t>(excess);
  }
  enc.encode(cum_[idx], freq_[idx], kMaxCoderTotal);
  if (idx == kLowEscape || idx == kHighEscape) {
    enc.encode_bits(literal, kEscapeLiteralBits);
  }
}

int GaussianBinModel::decode(RangeDecoder& dec) const {
  const uint32_t target = dec.decode_freq(kMaxCoderTotal);
  const int idx = static_cast<int>(
      std::upper_bound(cum_.begin(), cum_.end(), target) - cum_.begin()) - 1;
  dec.consume(cum_[idx], freq_[idx]);
  if (idx == kLowEscape || idx == kHighEscape) {
    const int excess = static_cast<int>(dec.decode_bits(kEscapeLiteralBits));
    const int mag = kGaussianBinRange + 1 + excess;
    return idx == kLowEscape ? -mag : mag;
  }
  return idx - kGaussianBinRange - 1;
}

uint32_t gaussian_bin_probability(double mu, double sigma, int k) {
  return GaussianBinModel(mu, sigma).probability(k);
}

// ---------------------------------------------------------------------------
// Stream helpers

std::vector<uint8_t> encode_symbols(std::span<const int> symbols,
                                    AdaptiveModel& model, int context) {
  RangeEncoder enc;
  for (int s : symbols) model.encode(enc, context, s);
  return enc.finish();
}

std::vector<int> decode_symbols(std::span<const uint8_t> bytes,
                                AdaptiveModel& model, size_t count,
                                int context) {
  RangeDecoder dec(bytes);
  std::vector<int> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) out.push_back(model.decode(dec, context));
  dec.finish();
  return out;
}

std::vector<uint8_t> encode_symbols(std::span<const int> symbols,
                                    std::span<const GaussianParams> models) {
  if (symbols.size() != models.size()) {
    throw InvalidArgument("encode_symbols: one Gaussian model per symbol required");
  }
  RangeEncoder enc;
  for (size_t i = 0; i < symbols.size(); ++i) {
    GaussianBinModel(models[i].mu, models[i].sigma).encode(enc, symbols[i]);
  }
  return enc.finish();
}

std::vector<int> decode_symbols(std::span<const uint8_t> bytes,
                                std::span<const GaussianParams> models) {
  RangeDecoder dec(bytes);
  std::vector<int> out;
  out.reserve(models.size());
  for (const GaussianParams& m : models) {
    out.push_back(GaussianBinModel(m.mu, m.sigma).decode(dec));
  }
  dec.finish();
  return out;
}

}  // namespace pgen
