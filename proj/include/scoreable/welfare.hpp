// Copyright 2026 The Scoreable Games Authors
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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "scoreable/game.hpp"

namespace scoreable {

enum class WelfareMetric { kUtilitarian, kEgalitarian, kNash };

inline std::string_view to_string(WelfareMetric m) {
  switch (m) {
    case WelfareMetric::kUtilitarian: return "usw";
    case WelfareMetric::kEgalitarian: return "esw";
    case WelfareMetric::kNash: return "nsw";
  }
  return "?";
}

inline std::optional<WelfareMetric> welfare_metric_from_string(std::string_view s) {
  if (s == "usw" || s == "USW") return WelfareMetric::kUtilitarian;
  if (s == "esw" || s == "ESW") return WelfareMetric::kEgalitarian;
  if (s == "nsw" || s == "NSW") return WelfareMetric::kNash;
  return std::nullopt;
}

// Sum of utilities.
inline std::int64_t usw(std::span<const int> u) { return std::accumulate(u.begin(), u.end(), std::int64_t{0}); }

// Minimum utility.
inline std::int64_t esw(std::span<const int> u) {
  if (u.empty()) return 0;
  return *std::min_element(u.begin(), u.end());
}

// Exact product of utilities. Throws std::overflow_error past 2^64-1, which
// cannot happen for utilities <= 100 and at most 9 parties.
inline std::uint64_t nsw(std::span<const int> u) {
  std::uint64_t product = 1;
  for (int v : u) {
    if (v < 0) throw std::domain_error("negative utility in Nash welfare");
    if (__builtin_mul_overflow(product, static_cast<std::uint64_t>(v), &product)) {
      throw std::overflow_error("Nash welfare product exceeds 64 bits");
    }
  }
  return product;
}

// Geometric mean of utilities, for plotting on the same scale as utilities.
inline double nsw_geometric_mean(std::span<const int> u) {
  if (u.empty()) return 0.0;
  double log_sum = 0.0;
  for (int v : u) {
    if (v == 0) return 0.0;
    log_sum += std::log(static_cast<double>(v));
  }
  return std::exp(log_sum / static_cast<double>(u.size()));
}

// Unified non-negative value so all three metrics share bounds machinery.
inline std::uint64_t welfare(WelfareMetric metric, std::span<const int> u) {
  switch (metric) {
    case WelfareMetric::kUtilitarian: return static_cast<std::uint64_t>(usw(u));
    case WelfareMetric::kEgalitarian: return static_cast<std::uint64_t>(esw(u));
    case WelfareMetric::kNash: return nsw(u);
  }
  return 0;
}

inline std::int64_t usw(const Game& game, const Deal& deal) { return usw(utilities(game, deal)); }
inline std::int64_t esw(const Game& game, const Deal& deal) { return esw(utilities(game, deal)); }
inline std::uint64_t nsw(const Game& game, const Deal& deal) { return nsw(utilities(game, deal)); }

}  // namespace scoreable
