// Copyright 2026 The qkdlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace qkdlab {

/// Chooses a measurement branch given the branch weights (Born probabilities).
class OutcomePicker {
 public:
  virtual ~OutcomePicker() = default;
  virtual std::size_t pick(std::span<const double> weights) = 0;
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based stream: draw i is a pure function of (seed, i), so a stream
/// can be split into independent children by key without shared state.
class RandomStream final : public OutcomePicker {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t position() const { return counter_; }

  std::uint64_t next_u64() { return splitmix64(seed_ + 0x9E3779B97F4A7C15ULL * counter_++); }

  /// Child stream keyed by `key`; does not advance this stream.
  RandomStream split(std::uint64_t key) const {
    return RandomStream(splitmix64(seed_ ^ splitmix64(key ^ 0xD1B54A32D192ED03ULL)));
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, n), unbiased by rejection.
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  std::size_t pick(std::span<const double> weights) override {
    double total = 0.0;
    for (double w : weights) total += w;
    const double u = uniform01() * total;
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      last_positive = i;
      cumulative += weights[i];
      if (u < cumulative) return i;
    }
    return last_positive;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace qkdlab
