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
#include <numeric>

#include "doctest.h"
#include "pgen/entropy.h"
#include "pgen/errors.h"
#include "pgen/synthetic.h"

namespace pgen {
namespace {

// Self-information of a symbol stream under a fresh adaptive model, computed
// by replaying the model update rule independently of the coder.
double adaptive_self_information(const std::vector<int>& symbols, int alphabet) {
  std::vector<uint32_t> counts(alphabet, 1);
  uint32_t total = alphabet;
  double bits = 0;
  for (int s : symbols) {
    bits -= std::log2(static_cast<double>(counts[s]) / total);
    ++counts[s];
    if (++total > (1u << 13)) {
      total = 0;
      for (uint32_t& c : counts) {
        c = std::max(1u, c / 2);
        total += c;
      }
    }
  }
  return bits;
}

double binary_entropy(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

TEST_CASE("empty stream is only flush overhead") {
  AdaptiveModel m(16);
  const auto bytes = encode_symbols(std::vector<int>{}, m);
  CHECK(bytes.size() <= 8);
  AdaptiveModel d(16);
  CHECK(decode_symbols(bytes, d, 0).empty());
}

TEST_CASE("single binary symbol fits in 9 bytes") {
  for (int s : {0, 1}) {
    AdaptiveModel m(2);
    const auto bytes = encode_symbols(std::vector<int>{s}, m);
    CHECK(bytes.size() <= 9);
    AdaptiveModel d(2);
    CHECK(decode_symbols(bytes, d, 1) == std::vector<int>{s});
  }
}

TEST_CASE("uniform alphabet-256 stream is near 1 byte per symbol") {
  SplitMix64 rng(1);
  std::vector<int> s(10000);
  for (int& v : s) v = static_cast<int>(rng.next() >> 56);
  AdaptiveModel m(256);
  const auto bytes = encode_symbols(s, m);
  CHECK(std::abs(static_cast<double>(bytes.size()) - 10000.0) <= 0.01 * 10000 + 16);
}

TEST_CASE("skewed binary stream approaches the binary entropy") {
  // Exactly 10% ones in random order, so the empirical entropy is H(0.9).
  SplitMix64 rng(2);
  std::vector<int> s(10000, 0);
  std::fill(s.begin(), s.begin() + 1000, 1);
  for (size_t i = s.size() - 1; i > 0; --i) std::swap(s[i], s[rng.next() % (i + 1)]);
  const double oracle = 10000 * binary_entropy(0.9) / 8;
  CHECK(oracle == doctest::Approx(586.4).epsilon(0.001));
  AdaptiveModel m(2);
  const auto bytes = encode_symbols(s, m);
  CHECK(std::abs(static_cast<double>(bytes.size()) - oracle) <= 0.01 * oracle + 16);
}

TEST_CASE("adaptive round trips, replay equality, and the Shannon bound") {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const int alphabet = 1 + static_cast<int>(rng.next() % 300);
    const int n = static_cast<int>(rng.next() % 3000);
    // Skewed source: mostly a few symbols, occasionally anything.
    std::vector<int> s(n);
    for (int& v : s) {
      v = rng.uniform() < 0.8 ? static_cast<int>(rng.next() % std::min(alphabet, 3))
                              : static_cast<int>(rng.next() % alphabet);
    }
    AdaptiveModel enc_model(alphabet);
    const auto bytes = encode_symbols(s, enc_model);
    AdaptiveModel dec_model(alphabet);
    REQUIRE(decode_symbols(bytes, dec_model, s.size()) == s);
    CHECK(enc_model == dec_model);
    CHECK(bytes.size() * 8.0 <= adaptive_self_information(s, alphabet) + 64);
  }
}

TEST_CASE("adaptive model rescales at the threshold") {
  AdaptiveModel m(4);
  for (int i = 0; i < 20000; ++i) m.update(0, 0);
  CHECK(m.total(0) <= AdaptiveModel::kRescaleThreshold);
  for (int s = 0; s < 4; ++s) CHECK(m.freq(0, s) >= 1);
  CHECK(m.total(0) <= (1u << 16) - 4);
  uint32_t sum = 0;
  for (int s = 0; s < 4; ++s) sum += m.freq(0, s);
  CHECK(sum == m.total(0));
}

TEST_CASE("adversarial skew round trips") {
  // Counts driven to the 1 vs 2^13 extreme, then the rare symbols are coded.
  std::vector<int> s(30000, 5);
  for (int i = 0; i < 50; ++i) s.push_back(i % 64);
  AdaptiveModel enc(64);
  const auto bytes = encode_symbols(s, enc);
  AdaptiveModel dec(64);
  CHECK(decode_symbols(bytes, dec, s.size()) == s);
}

TEST_CASE("contexts are independent") {
  AdaptiveModel m(8, 3);
  RangeEncoder enc;
  const int seq[][2] = {{0, 1}, {1, 7}, {2, 3}, {0, 1}, {1, 7}, {0, 2}};
  for (auto [ctx, sym] : seq) m.encode(enc, ctx, sym);
  const auto bytes = enc.finish();
  AdaptiveModel d(8, 3);
  RangeDecoder dec(bytes);
  for (auto [ctx, sym] : seq) CHECK(d.decode(dec, ctx) == sym);
  dec.finish();
  CHECK(m.freq(1, 7) == 3);
  CHECK(m.freq(0, 7) == 1);
}

TEST_CASE("symbol outside the alphabet is rejected") {
  AdaptiveModel m(4);
  CHECK_THROWS_AS(encode_symbols(std::vector<int>{4}, m), InvalidArgument);
  CHECK_THROWS_AS(encode_symbols(std::vector<int>{-1}, m), InvalidArgument);
  CHECK_THROWS_AS(AdaptiveModel(0), InvalidArgument);
  CHECK_THROWS_AS(AdaptiveModel(AdaptiveModel::kMaxAlphabet + 1), InvalidArgument);
}

TEST_CASE("truncated and extended payloads are detected") {
  SplitMix64 rng(4);
  std::vector<int> s(500);
  for (int& v : s) v = static_cast<int>(rng.next() % 40);
  AdaptiveModel m(40);
  const auto bytes = encode_symbols(s, m);
  for (size_t cut = 0; cut < bytes.size(); ++cut) {
    AdaptiveModel d(40);
    const std::vector<uint8_t> part(bytes.begin(), bytes.begin() + cut);
    CHECK_THROWS_AS(decode_symbols(part, d, s.size()), DecodeError);
  }
  auto longer = bytes;
  longer.push_back(0);
  AdaptiveModel d(40);
  CHECK_THROWS_AS(decode_symbols(longer, d, s.size()), DecodeError);
}

TEST_CASE("decoding with a mismatched model never reads out of bounds") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> s(100);
    for (int& v : s) v = static_cast<int>(rng.next() % 10);
    AdaptiveModel m(10);
    const auto bytes = encode_symbols(s, m);
    AdaptiveModel wrong(7 + static_cast<int>(rng.next() % 20));
    try {
      const auto out = decode_symbols(bytes, wrong, s.size());
      for (int v : out) CHECK((v >= 0 && v < wrong.alphabet_size()));
    } catch (const DecodeError&) {
    }
    std::vector<uint8_t> junk(rng.next() % 64);
    for (uint8_t& b : junk) b = static_cast<uint8_t>(rng.next());
    AdaptiveModel fresh(10);
    try {
      decode_symbols(junk, fresh, 50);
    } catch (const DecodeError&) {
    }
  }
}

TEST_CASE("raw bits round trip") {
  RangeEncoder enc;
  const uint32_t values[] = {0, 1, 0xABCD, 0xFFFFFFFFu, 12345678, 0x7};
  const int widths[] = {0, 1, 16, 32, 24, 3};
  for (int i = 0; i < 6; ++i) enc.encode_bits(values[i], widths[i]);
  const auto bytes = enc.finish();
  RangeDecoder dec(bytes);
  for (int i = 0; i < 6; ++i) CHECK(dec.decode_bits(widths[i]) == values[i]);
  dec.finish();
}

TEST_CASE("erf approximation matches the standard library") {
  for (double x = -5; x <= 5; x += 0.01) {
    CHECK(std::abs(erf_approx(x) - std::erf(x)) <= 1.5e-7);
  }
  for (double z = -6; z <= 6; z += 0.05) {
    CHECK(std::abs(normal_cdf(z) - 0.5 * std::erfc(-z / std::sqrt(2.0))) <= 1e-7);
  }
}

TEST_CASE("gaussian bin mass") {
  // Phi(0.5) - Phi(-0.5) = erf(0.5 / sqrt 2).
  const double oracle = std::erf(0.5 / std::sqrt(2.0));
  CHECK(oracle == doctest::Approx(0.38292).epsilon(1e-4));
  CHECK(gaussian_bin_mass(0, 1, 0) == doctest::Approx(oracle).epsilon(1e-6));
  for (double sigma : {0.1, 0.5, 1.0, 3.7, 40.0}) {
    for (int k = 0; k < 300; k += 7) {
      CHECK(gaussian_bin_mass(0, sigma, k) == gaussian_bin_mass(0, sigma, -k));
    }
  }
  // Sigma below the floor is clamped, not rejected.
  CHECK(gaussian_bin_mass(0, 0.01, 0) == gaussian_bin_mass(0, kSigmaFloor, 0));
}

TEST_CASE("gaussian table normalization, floor, and symmetry") {
  SplitMix64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const double mu = rng.uniform(-300, 300);
    const double sigma = std::exp(rng.uniform(std::log(0.05), std::log(200.0)));
    const GaussianBinModel g(mu, sigma);
    uint64_t total = 0;
    for (int i = 0; i < GaussianBinModel::kBins; ++i) {
      CHECK(g.freq_at(i) >= 1);
      total += g.freq_at(i);
    }
    CHECK(total == kMaxCoderTotal);
    CHECK(g.cum_at(GaussianBinModel::kBins) == kMaxCoderTotal);
  }
  const GaussianBinModel z(0, 2.5);
  for (int k = 0; k <= kGaussianBinRange; ++k) CHECK(z.probability(k) == z.probability(-k));
  CHECK(z.probability(-1000) == z.probability(1000));
}

TEST_CASE("gaussian table is monotone away from the mean bin") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const double mu = rng.uniform(-260, 260);
    const double sigma = std::exp(rng.uniform(std::log(0.1), std::log(100.0)));
    const GaussianBinModel g(mu, sigma);
    const int mode = std::clamp(static_cast<int>(std::floor(mu + 0.5)), -kGaussianBinRange,
                                kGaussianBinRange);
    for (int k = mode; k < kGaussianBinRange; ++k) {
      CHECK(g.probability(k + 1) <= g.probability(k));
    }
    for (int k = mode; k > -kGaussianBinRange; --k) {
      CHECK(g.probability(k - 1) <= g.probability(k));
    }
  }
}

TEST_CASE("gaussian round trips with escapes and the Shannon bound") {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = static_cast<int>(rng.next() % 400);
    std::vector<int> s(n);
    std::vector<GaussianParams> params(n);
    double bound = 0;
    for (int i = 0; i < n; ++i) {
      params[i] = {rng.uniform(-20, 20), rng.uniform(0.05, 30)};
      const double u = rng.uniform();
      if (u < 0.02) {
        s[i] = static_cast<int>(rng.next() % 60000) - 30000;  // escapes
      } else {
        s[i] = static_cast<int>(std::lround(params[i].mu + params[i].sigma * (u - 0.5) * 4));
      }
      bound += GaussianBinModel(params[i].mu, params[i].sigma).cost_bits(s[i]);
    }
    const auto bytes = encode_symbols(s, params);
    REQUIRE(decode_symbols(bytes, params) == s);
    CHECK(bytes.size() * 8.0 <= bound + 64);
  }
}

TEST_CASE("gaussian escape range is bounded") {
  const std::vector<GaussianParams> p = {{0, 1}};
  CHECK_THROWS_AS(encode_symbols(std::vector<int>{kGaussianBinRange + 1 + 65536}, p),
                  InvalidArgument);
  CHECK_NOTHROW(encode_symbols(std::vector<int>{-(kGaussianBinRange + 65536)}, p));
}

}  // namespace
}  // namespace pgen
