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

// Exhaustive deal-space statistics: acceptance-set sizes, score sparsity,
// preference overlap (IoU) and welfare extrema. Everything here enumerates
// the full product space; nothing is sampled.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "scoreable/game.hpp"
#include "scoreable/welfare.hpp"

namespace scoreable {

// Visits every deal in lexicographic order (first issue slowest).
template <typename Visitor>
void for_each_deal(const Game& game, Visitor&& visit) {
  const auto& issues = game.issues();
  Deal deal(std::vector<int>(issues.size(), 0));
  while (true) {
    visit(static_cast<const Deal&>(deal));
    std::size_t i = issues.size();
    while (i > 0) {
      --i;
      if (static_cast<std::size_t>(++deal.choice[i]) < issues[i].size()) break;
      deal.choice[i] = 0;
      if (i == 0) return;
    }
    if (issues.empty()) return;
  }
}

inline std::vector<Deal> enumerate_deals(const Game& game) {
  std::vector<Deal> out;
  out.reserve(game.deal_space_size());
  for_each_deal(game, [&](const Deal& d) { out.push_back(d); });
  return out;
}

struct UtilityRange {
  int min = 0;
  int max = 0;
};

struct DealSpaceStats {
  std::size_t total = 0;
  std::size_t n_acceptable = 0;
  std::size_t n_hard = 0;
  std::size_t zero_slots = 0;
  std::size_t weight_slots = 0;
  double sparsity_pct = 0.0;
  double iou_pct = 0.0;
  std::vector<UtilityRange> utility_range;  // per party, over the full space
};

// Per-issue min/max overlap of two parties' weights, averaged over issues.
// An issue where both parties weigh every option at zero counts as 1.0.
inline double pairwise_iou(const Game& game, std::size_t px, std::size_t py) {
  const auto& a = game.scores(px);
  const auto& b = game.scores(py);
  double sum = 0.0;
  for (std::size_t i = 0; i < game.num_issues(); ++i) {
    long num = 0, den = 0;
    for (std::size_t o = 0; o < a[i].size(); ++o) {
      num += std::min(a[i][o], b[i][o]);
      den += std::max(a[i][o], b[i][o]);
    }
    sum += den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
  }
  return game.num_issues() == 0 ? 1.0 : sum / static_cast<double>(game.num_issues());
}

inline double pairwise_iou(const Game& game, const std::string& px, const std::string& py) {
  return pairwise_iou(game, game.party_index(px), game.party_index(py));
}

// Mean pairwise IoU over ordered pairs of distinct parties.
inline double overall_iou(const Game& game) {
  const std::size_t n = game.num_parties();
  if (n < 2) throw ValidationError("overall IoU needs at least two parties");
  double outer = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    double inner = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      if (y != x) inner += pairwise_iou(game, x, y);
    }
    outer += inner / static_cast<double>(n - 1);
  }
  return outer / static_cast<double>(n);
}

inline DealSpaceStats compute_stats(const Game& game) {
  DealSpaceStats s;
  const std::size_t n = game.num_parties();
  s.utility_range.assign(n, {std::numeric_limits<int>::max(), std::numeric_limits<int>::min()});
  std::vector<int> u(n);
  for_each_deal(game, [&](const Deal& deal) {
    ++s.total;
    for (std::size_t p = 0; p < n; ++p) {
      u[p] = score(game.scores(p), deal);
      s.utility_range[p].min = std::min(s.utility_range[p].min, u[p]);
      s.utility_range[p].max = std::max(s.utility_range[p].max, u[p]);
    }
    if (acceptable_utilities(game, u)) ++s.n_acceptable;
    if (hard_acceptable_utilities(game, u)) ++s.n_hard;
  });
  for (std::size_t p = 0; p < n; ++p) {
    for (const auto& row : game.scores(p)) {
      s.weight_slots += row.size();
      s.zero_slots += static_cast<std::size_t>(std::count(row.begin(), row.end(), 0));
    }
  }
  s.sparsity_pct = s.weight_slots == 0 ? 0.0 : 100.0 * static_cast<double>(s.zero_slots) / static_cast<double>(s.weight_slots);
  s.iou_pct = n >= 2 ? 100.0 * overall_iou(game) : 100.0;
  return s;
}

struct WelfareBounds {
  std::uint64_t min = 0;
  std::uint64_t max = 0;
};

inline WelfareBounds welfare_bounds(const Game& game, WelfareMetric metric) {
  WelfareBounds b{std::numeric_limits<std::uint64_t>::max(), 0};
  std::vector<int> u(game.num_parties());
  for_each_deal(game, [&](const Deal& deal) {
    for (std::size_t p = 0; p < u.size(); ++p) u[p] = score(game.scores(p), deal);
    const std::uint64_t v = welfare(metric, u);
    b.min = std::min(b.min, v);
    b.max = std::max(b.max, v);
  });
  return b;
}

// Two decimals, half-up.
inline std::string format_percent(double value) {
  const double rounded = std::floor(value * 100.0 + 0.5 + 1e-9) / 100.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", rounded);
  return buf;
}

}  // namespace scoreable
