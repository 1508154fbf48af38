// Copyright (c) 2026 the tesim authors
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

#ifndef TESIM_FIXED_POINT_HPP
#define TESIM_FIXED_POINT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace tesim {

// Two fixed-point resolutions are used throughout:
//   micro (1e-6): token balances, payments on the ledger, settlement.
//   nano  (1e-9): coordinator state and optimization payloads, where the
//                 convergence threshold itself sits at 1e-6 and the message
//                 resolution must be well below it.
inline constexpr std::int64_t kMicroScale = 1'000'000;
inline constexpr std::int64_t kNanoScale = 1'000'000'000;

inline std::int64_t to_micro(double value) {
  double scaled = value * static_cast<double>(kMicroScale);
  if (!(std::abs(scaled) < 9.2e18)) {
    throw std::overflow_error("to_micro: value out of range: " + std::to_string(value));
  }
  return std::llround(scaled);
}

inline double from_micro(std::int64_t value) {
  return static_cast<double>(value) / static_cast<double>(kMicroScale);
}

inline std::int64_t to_nano(double value) {
  double scaled = value * static_cast<double>(kNanoScale);
  if (!(std::abs(scaled) < 9.2e18)) {
    throw std::overflow_error("to_nano: value out of range: " + std::to_string(value));
  }
  return std::llround(scaled);
}

inline double from_nano(std::int64_t value) {
  return static_cast<double>(value) / static_cast<double>(kNanoScale);
}

// Splits `total` into `weights.size()` integer parts proportional to the
// (non-negative) weights, exactly conserving the total. Uses largest-remainder
// apportionment; ties go to the lowest index, which keeps the result
// independent of map iteration order as long as callers pass a canonically
// ordered weight vector.
inline std::vector<std::int64_t> apportion_largest_remainder(
    std::int64_t total, const std::vector<double>& weights) {
  const std::size_t n = weights.size();
  std::vector<std::int64_t> out(n, 0);
  if (n == 0) {
    if (total != 0) throw std::invalid_argument("apportion: no recipients for nonzero total");
    return out;
  }
  double weight_sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("apportion: negative weight");
    weight_sum += w;
  }
  if (weight_sum <= 0.0) {
    // Degenerate: spread evenly, remainder to the lowest indices.
    std::int64_t base = total / static_cast<std::int64_t>(n);
    std::int64_t rem = total - base * static_cast<std::int64_t>(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = base;
    for (std::int64_t i = 0; i < std::llabs(rem); ++i) {
      out[static_cast<std::size_t>(i)] += rem > 0 ? 1 : -1;
    }
    return out;
  }
  std::int64_t assigned = 0;
  std::vector<double> fraction(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double share = static_cast<double>(total) * (weights[i] / weight_sum);
    double floored = std::floor(share);
    out[i] = static_cast<std::int64_t>(floored);
    fraction[i] = share - floored;
    assigned += out[i];
  }
  std::int64_t leftover = total - assigned;
  // leftover in [0, n): hand out single units by descending fractional part.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return fraction[a] > fraction[b];
  });
  for (std::int64_t k = 0; k < leftover; ++k) {
    out[order[static_cast<std::size_t>(k) % n]] += 1;
  }
  return out;
}

}  // namespace tesim

#endif  // TESIM_FIXED_POINT_HPP
