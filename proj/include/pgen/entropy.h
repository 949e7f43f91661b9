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

// Byte-oriented range coder plus the two probability models it is driven by:
//  - AdaptiveModel: per-context frequency counts, updated after each symbol.
//  - GaussianBinModel: discretized N(mu, sigma) over integer bins with two
//    escape bins for the tails, quantized to 16-bit probabilities.

#ifndef PGEN_ENTROPY_H_
#define PGEN_ENTROPY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pgen {

// Largest frequency total either model hands to the coder.
constexpr uint32_t kMaxCoderTotal = 1u << 16;

// 64-bit low / 32-bit range encoder with byte-wise renormalization. Carries
// are resolved through a cached byte plus a run of pending 0xFF bytes.
class RangeEncoder {
 public:
  RangeEncoder() = default;

  // Narrows the interval to [cum, cum + freq) out of total (total <= 2^16).
  void encode(uint32_t cum, uint32_t freq, uint32_t total);

  // Equiprobable bits, most significant first; nbits in [0, 32].
  void encode_bits(uint32_t value, int nbits);

  // Number of bytes already final (pending carry bytes are not counted).
  size_t bytes_emitted() const { return out_.size(); }

  // Flushes the 4 bytes of `low` and returns the complete stream. The
  // decoder consumes exactly this many bytes.
  std::vector<uint8_t> finish();

  uint32_t range() const { return range_; }

 private:
  void shift_low();
  void emit(uint8_t b);

  uint64_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint8_t cache_ = 0;
  uint64_t pending_ = 1;  // cache byte + run of 0xFF bytes awaiting a carry
  bool leading_byte_ = true;
  std::vector<uint8_t> out_;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const uint8_t> bytes);

  // Returns the cumulative-frequency slot of the next symbol; must be followed
  // by consume() with that symbol's (cum, freq).
  uint32_t decode_freq(uint32_t total);
  void consume(uint32_t cum, uint32_t freq);

  uint32_t decode_bits(int nbits);

  // Throws DecodeError unless every input byte has been consumed.
  void finish() const;

  size_t position() const { return pos_; }

 private:
  uint8_t next_byte();
  void normalize();

  std::span<const uint8_t> in_;
  size_t pos_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint32_t code_ = 0;
  uint32_t step_ = 0;
};

// Frequency-count model: counts start at 1 and grow by 1 per coded symbol;
// once a context's total exceeds 2^13 every count is halved (floor 1).
class AdaptiveModel {
 public:
  static constexpr uint32_t kRescaleThreshold = 1u << 13;
  static constexpr int kMaxAlphabet = 4096;

  AdaptiveModel(int alphabet_size, int context_count = 1);

  int alphabet_size() const { return alphabet_; }
  int context_count() const { return contexts_; }

  uint32_t freq(int ctx, int symbol) const { return counts(ctx)[symbol]; }
  uint32_t total(int ctx) const { return totals_[ctx]; }
  uint32_t cumulative(int ctx, int symbol) const;

  // -log2 P(symbol) under the current state.
  double cost_bits(int ctx, int symbol) const;

  void update(int ctx, int symbol);

  void encode(RangeEncoder& enc, int ctx, int symbol);
  int decode(RangeDecoder& dec, int ctx);

  bool operator==(const AdaptiveModel&) const = default;

 private:
  std::span<const uint16_t> counts(int ctx) const {
    return {counts_.data() + static_cast<size_t>(ctx) * alphabet_,
            static_cast<size_t>(alphabet_)};
  }
  void check(int ctx, int symbol) const;

  int alphabet_;
  int contexts_;
  std::vector<uint16_t> counts_;
  std::vector<uint32_t> totals_;
};

// Standard normal helpers built on the Abramowitz-Stegun 7.1.26 rational
// approximation (|erf error| <= 1.5e-7).
double erf_approx(double x);
double normal_cdf(double z);

constexpr int kGaussianBinRange = 255;  // integer bins cover [-B, B]
constexpr double kSigmaFloor = 0.1;
constexpr int kEscapeLiteralBits = 16;

// Real-valued probability of integer bin k under N(mu, sigma):
// Phi((k + 0.5 - mu) / sigma) - Phi((k - 0.5 - mu) / sigma). Bins below -B or
// above B denote the corresponding escape bin and receive the whole tail.
double gaussian_bin_mass(double mu, double sigma, int k);

// Discretized Gaussian over 2B + 1 integer bins plus a low and a high escape
// bin. Fixed-point frequencies sum to exactly 2^16 and every bin has at least
// 1. Sigma below kSigmaFloor is clamped.
class GaussianBinModel {
 public:
  static constexpr int kBins = 2 * kGaussianBinRange + 3;
  static constexpr int kLowEscape = 0;
  static constexpr int kHighEscape = kBins - 1;

  GaussianBinModel(double mu, double sigma);

  double mu() const { return mu_; }
  double sigma() const { return sigma_; }

  // Bin index for an integer value (escape bins for out-of-range values).
  static int index_of(int value);

  uint32_t freq_at(int index) const { return freq_[index]; }
  uint32_t cum_at(int index) const { return cum_[index]; }
  uint32_t probability(int value) const { return freq_[index_of(value)]; }

  // -log2 of the fixed-point probability, plus literal bits for escapes.
  double cost_bits(int value) const;

  void encode(RangeEncoder& enc, int value) const;
  int decode(RangeDecoder& dec) const;

 private:
  double mu_;
  double sigma_;
  std::vector<uint32_t> freq_;
  std::vector<uint32_t> cum_;  // kBins + 1 entries
};

// Fixed-point probability (in 1/2^16 units) of bin k under the same rules as
// GaussianBinModel.
uint32_t gaussian_bin_probability(double mu, double sigma, int k);

struct GaussianParams {
  double mu = 0;
  double sigma = 1;
};

// Whole-stream helpers. The adaptive variants update `model` in place so the
// caller can compare encoder- and decoder-side state afterwards.
std::vector<uint8_t> encode_symbols(std::span<const int> symbols,
                                    AdaptiveModel& model, int context = 0);
std::vector<int> decode_symbols(std::span<const uint8_t> bytes,
                                AdaptiveModel& model, size_t count,
                                int context = 0);

std::vector<uint8_t> encode_symbols(std::span<const int> symbols,
                                    std::span<const GaussianParams> models);
std::vector<int> decode_symbols(std::span<const uint8_t> bytes,
                                std::span<const GaussianParams> models);

}  // namespace pgen

#endif  // PGEN_ENTROPY_H_
