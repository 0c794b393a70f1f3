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

// Session and batch metrics.
//
// Denominators:
//   final_5way / final_6way / any   completed sessions
//   wrong                           agent proposals with a parsed deal (pooled)
//   leaked                          agent messages (pooled, per message)
//   leaked_sessions                 completed sessions
//   failed                          all sessions
// Turn 0 is the injected anchor: it counts toward "any" but is not an agent
// message, so it never counts toward wrong or leaked.

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scoreable/deal_space.hpp"
#include "scoreable/game.hpp"
#include "scoreable/game_io.hpp"
#include "scoreable/protocol.hpp"
#include "scoreable/welfare.hpp"

namespace scoreable {

struct WelfarePoint {
  std::size_t turn = 0;
  std::string speaker;
  std::int64_t usw = 0;
  std::int64_t esw = 0;
  std::uint64_t nsw = 0;
  double nsw_geomean = 0.0;
};

struct WelfareSeries {
  std::vector<WelfarePoint> points;
  WelfareBounds usw_bounds;
  WelfareBounds esw_bounds;
  WelfareBounds nsw_bounds;
};

struct SessionMetrics {
  Termination termination = Termination::kCompleted;
  bool failed = false;
  bool final_5way = false;
  bool final_6way = false;
  bool any = false;
  std::size_t proposals = 0;  // agent turns with a parsed deal
  std::size_t wrong = 0;
  std::size_t messages = 0;  // agent turns recorded
  std::size_t leaked_messages = 0;
  bool leaked = false;
  std::vector<WelfarePoint> welfare;

  double wrong_rate() const { return proposals == 0 ? 0.0 : static_cast<double>(wrong) / static_cast<double>(proposals); }
};

inline std::vector<WelfarePoint> welfare_points(const Transcript& tr, const Game& game) {
  std::vector<WelfarePoint> out;
  for (const auto& ev : tr.turns) {
    if (!ev.response.deal) continue;
    const auto u = utilities(game, *ev.response.deal);
    out.push_back({ev.index, ev.speaker, usw(u), esw(u), nsw(u), nsw_geometric_mean(u)});
  }
  return out;
}

inline WelfareSeries welfare_series(const Transcript& tr, const Game& game) {
  return {welfare_points(tr, game), welfare_bounds(game, WelfareMetric::kUtilitarian),
          welfare_bounds(game, WelfareMetric::kEgalitarian), welfare_bounds(game, WelfareMetric::kNash)};
}

inline SessionMetrics session_metrics(const Transcript& tr, const Game& game) {
  if (tr.game_id != game.id()) {
    throw ValidationError("transcript of game '" + tr.game_id + "' evaluated against game '" + game.id() + "'");
  }
  SessionMetrics m;
  m.termination = tr.termination;
  m.failed = tr.failed();
  const std::size_t p1 = 0;
  for (const auto& ev : tr.turns) {
    const std::size_t speaker = game.party_index(ev.speaker);
    if (ev.response.deal && !game.is_valid_deal(*ev.response.deal)) {
      throw ValidationError("transcript deal does not fit game '" + game.id() + "'");
    }
    if (speaker == p1 && ev.response.deal && is_acceptable(game, *ev.response.deal)) m.any = true;
    if (ev.index == 0) continue;
    ++m.messages;
    if (ev.response.leaked) ++m.leaked_messages;
    if (ev.response.deal) {
      ++m.proposals;
      if (utility(game, speaker, *ev.response.deal) < game.party(speaker).threshold) ++m.wrong;
    }
  }
  m.leaked = m.leaked_messages > 0;
  if (!m.failed && tr.final_deal) {
    m.final_5way = is_acceptable(game, *tr.final_deal);
    m.final_6way = is_hard_acceptable(game, *tr.final_deal);
  }
  if (m.failed) m.any = false;
  m.welfare = welfare_points(tr, game);
  return m;
}

struct Regression {
  double slope = 0.0;
  double variance = 0.0;     // population variance of the values
  double correlation = 0.0;  // Pearson; 0 when either side has zero variance
};

inline Regression trend_regression(std::span<const double> xs, std::span<const double> ys) {
  if (ys.size() < 2 || xs.size() != ys.size()) throw std::invalid_argument("trend regression needs at least 2 points");
  const double n = static_cast<double>(ys.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  Regression r;
  r.slope = sxx == 0.0 ? 0.0 : sxy / sxx;
  r.variance = syy / n;
  r.correlation = (sxx == 0.0 || syy == 0.0) ? 0.0 : sxy / std::sqrt(sxx * syy);
  return r;
}

// Values against their position 0, 1, 2, ...
inline Regression trend_regression(std::span<const double> ys) {
  std::vector<double> xs(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i);
  return trend_regression(xs, ys);
}

struct AggregateReport {
  std::size_t n_sessions = 0;
  std::size_t n_completed = 0;
  std::size_t n_failed = 0;
  std::size_t n_failed_transport = 0;
  // Percentages; nullopt marks an empty denominator.
  std::optional<double> final_5way;
  std::optional<double> final_6way;
  std::optional<double> any;
  std::optional<double> wrong;
  std::optional<double> leaked;
  std::optional<double> leaked_sessions;
  double failed = 0.0;
  // Mean USW per turn over completed sessions, and its linear trend.
  std::vector<std::pair<std::size_t, double>> mean_usw;
  std::optional<Regression> usw_trend;
  std::optional<WelfareBounds> usw_bounds;
  std::optional<WelfareBounds> esw_bounds;
  std::optional<WelfareBounds> nsw_bounds;
  bool any_includes_anchor = true;
};

inline AggregateReport aggregate(std::span<const SessionMetrics> sessions) {
  if (sessions.empty()) throw std::invalid_argument("aggregate needs at least one session");
  AggregateReport r;
  r.n_sessions = sessions.size();
  std::size_t n5 = 0, n6 = 0, n_any = 0, proposals = 0, wrong = 0, messages = 0, leaked = 0, leaked_sessions = 0;
  std::map<std::size_t, std::pair<std::int64_t, std::int64_t>> usw_by_turn;  // turn -> (sum, count)
  for (const auto& s : sessions) {
    if (s.failed) {
      ++r.n_failed;
      if (s.termination == Termination::kFailedTransport) ++r.n_failed_transport;
      continue;
    }
    ++r.n_completed;
    n5 += s.final_5way;
    n6 += s.final_6way;
    n_any += s.any;
    proposals += s.proposals;
    wrong += s.wrong;
    messages += s.messages;
    leaked += s.leaked_messages;
    leaked_sessions += s.leaked;
    for (const auto& w : s.welfare) {
      auto& [sum, count] = usw_by_turn[w.turn];
      sum += w.usw;
      ++count;
    }
  }
  auto pct = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return 100.0 * static_cast<double>(num) / static_cast<double>(den);
  };
  r.final_5way = pct(n5, r.n_completed);
  r.final_6way = pct(n6, r.n_completed);
  r.any = pct(n_any, r.n_completed);
  r.wrong = r.n_completed ? pct(wrong, proposals) : std::nullopt;
  if (r.n_completed && proposals == 0) r.wrong = 0.0;
  r.leaked = r.n_completed ? pct(leaked, messages) : std::nullopt;
  if (r.n_completed && messages == 0) r.leaked = 0.0;
  r.leaked_sessions = pct(leaked_sessions, r.n_completed);
  r.failed = *pct(r.n_failed, r.n_sessions);

  std::vector<double> xs, ys;
  for (const auto& [turn, sc] : usw_by_turn) {
    const double mean = static_cast<double>(sc.first) / static_cast<double>(sc.second);
    r.mean_usw.emplace_back(turn, mean);
    xs.push_back(static_cast<double>(turn));
    ys.push_back(mean);
  }
  if (ys.size() >= 2) r.usw_trend = trend_regression(xs, ys);
  return r;
}

inline void attach_bounds(AggregateReport& r, const Game& game) {
  r.usw_bounds = welfare_bounds(game, WelfareMetric::kUtilitarian);
  r.esw_bounds = welfare_bounds(game, WelfareMetric::kEgalitarian);
  r.nsw_bounds = welfare_bounds(game, WelfareMetric::kNash);
}

// ---------------------------------------------------------------------------
// Emission

inline std::string format_optional_percent(const std::optional<double>& v) {
  return v ? format_percent(*v) : std::string("n/a");
}

inline json aggregate_to_json(const AggregateReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json("n/a"); };
  auto bounds = [](const std::optional<WelfareBounds>& b) {
    return b ? json({{"min", b->min}, {"max", b->max}}) : json(nullptr);
  };
  json doc;
  doc["n_sessions"] = r.n_sessions;
  doc["n_completed"] = r.n_completed;
  doc["n_failed"] = r.n_failed;
  doc["n_failed_transport"] = r.n_failed_transport;
  doc["final_5way_pct"] = opt(r.final_5way);
  doc["final_6way_pct"] = opt(r.final_6way);
  doc["any_pct"] = opt(r.any);
  doc["any_includes_anchor"] = r.any_includes_anchor;
  doc["wrong_pct"] = opt(r.wrong);
  doc["leaked_pct"] = opt(r.leaked);
  doc["leaked_sessions_pct"] = opt(r.leaked_sessions);
  doc["failed_pct"] = r.failed;
  doc["mean_usw"] = json::array();
  for (const auto& [turn, mean] : r.mean_usw) doc["mean_usw"].push_back({{"turn", turn}, {"usw", mean}});
  if (r.usw_trend) {
    doc["usw_trend"] = {{"slope", r.usw_trend->slope},
                        {"variance", r.usw_trend->variance},
                        {"correlation", r.usw_trend->correlation}};
  } else {
    doc["usw_trend"] = nullptr;
  }
  doc["welfare_bounds"] = {{"usw", bounds(r.usw_bounds)}, {"esw", bounds(r.esw_bounds)}, {"nsw", bounds(r.nsw_bounds)}};
  return doc;
}

inline std::string metrics_csv_header() {
  return "experiment,n_sessions,n_failed,final_5way,final_6way,any,wrong,leaked,leaked_sessions,failed";
}

inline std::string metrics_csv_row(const std::string& experiment, const AggregateReport& r) {
  std::ostringstream out;
  out << experiment << ',' << r.n_sessions << ',' << r.n_failed << ',' << format_optional_percent(r.final_5way) << ','
      << format_optional_percent(r.final_6way) << ',' << format_optional_percent(r.any) << ','
      << format_optional_percent(r.wrong) << ',' << format_optional_percent(r.leaked) << ','
      << format_optional_percent(r.leaked_sessions) << ',' << format_percent(r.failed);
  return out.str();
}

inline std::string welfare_csv(const WelfareSeries& s) {
  std::ostringstream out;
  out << "turn,speaker,usw,esw,nsw,nsw_geomean,usw_min,usw_max,esw_min,esw_max,nsw_min,nsw_max\n";
  for (const auto& p : s.points) {
    char geo[32];
    std::snprintf(geo, sizeof(geo), "%.4f", p.nsw_geomean);
    out << p.turn << ',' << p.speaker << ',' << p.usw << ',' << p.esw << ',' << p.nsw << ',' << geo << ','
        << s.usw_bounds.min << ',' << s.usw_bounds.max << ',' << s.esw_bounds.min << ',' << s.esw_bounds.max << ','
        << s.nsw_bounds.min << ',' << s.nsw_bounds.max << '\n';
  }
  return out.str();
}

}  // namespace scoreable
