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

// Static description of a scoreable negotiation game: issues with discrete
// options, parties with private integer score tables and acceptance
// thresholds, and the acceptance predicates evaluated over complete deals.

#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace scoreable {

inline constexpr int kMaxUtility = 100;
inline constexpr int kDefaultRounds = 24;

struct Diagnostic {
  std::string path;  // field path inside the config, e.g. "parties[2].threshold"
  std::string message;

  std::string to_string() const { return path.empty() ? message : path + ": " + message; }
  bool operator==(const Diagnostic&) const = default;
};

class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(std::vector<Diagnostic> diagnostics)
      : std::invalid_argument(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}
  explicit ValidationError(const std::string& message)
      : ValidationError(std::vector<Diagnostic>{{"", message}}) {}

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  static std::string join(const std::vector<Diagnostic>& diagnostics) {
    std::string out;
    for (const auto& d : diagnostics) {
      if (!out.empty()) out += "; ";
      out += d.to_string();
    }
    return out;
  }

  std::vector<Diagnostic> diagnostics_;
};

struct Issue {
  std::string id;  // short code, "A".."E" by convention
  std::string name;
  std::vector<std::string> options;

  std::size_t size() const { return options.size(); }
};

struct Party {
  std::string id;
  std::string name;
  bool veto = false;
  int threshold = 0;
  std::string role_text;
};

// One chosen option per issue, stored as zero-based option indices in issue
// order. Deal strings use one-based option numbers ("A1" is index 0).
struct Deal {
  std::vector<int> choice;

  Deal() = default;
  explicit Deal(std::vector<int> c) : choice(std::move(c)) {}

  int operator[](std::size_t issue) const { return choice[issue]; }
  std::size_t size() const { return choice.size(); }

  auto operator<=>(const Deal&) const = default;
  bool operator==(const Deal&) const = default;
};

// weights[party][issue][option]
using ScoreTable = std::vector<std::vector<int>>;
using WeightTensor = std::vector<ScoreTable>;

struct GameData {
  std::string id;
  std::string setting_text;
  std::vector<Issue> issues;
  std::vector<Party> parties;  // p1 first, p2 second
  WeightTensor weights;
  Deal initial_deal;
  int rounds = kDefaultRounds;
  // Named party groupings used by experiment configs (e.g. "benefit",
  // "const" for greedy-player variants). Pure data; never used in scoring.
  std::map<std::string, std::vector<std::string>> party_groups;
};

// Full invariant check. Returns an empty list for a valid game.
inline std::vector<Diagnostic> validate_game_data(const GameData& g);
// Only the shape checks that every other routine relies on for memory safety.
inline std::vector<Diagnostic> validate_game_shape(const GameData& g);

// Immutable, validated game. Safe to share between concurrent sessions.
class Game {
 public:
  explicit Game(GameData data) : data_(std::move(data)) {
    auto diagnostics = validate_game_data(data_);
    if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));
  }

  // Skips the semantic invariants (weight sums, veto layout, party count) but
  // still enforces shape consistency. Used for degenerate test fixtures.
  static Game unchecked(GameData data) {
    auto diagnostics = validate_game_shape(data);
    if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));
    return Game(std::move(data), Unchecked{});
  }

  const GameData& data() const { return data_; }
  const std::string& id() const { return data_.id; }
  const std::vector<Issue>& issues() const { return data_.issues; }
  const std::vector<Party>& parties() const { return data_.parties; }
  const Party& party(std::size_t p) const { return data_.parties.at(p); }
  std::size_t num_parties() const { return data_.parties.size(); }
  std::size_t num_issues() const { return data_.issues.size(); }
  int rounds() const { return data_.rounds; }
  const Deal& initial_deal() const { return data_.initial_deal; }
  const ScoreTable& scores(std::size_t p) const { return data_.weights.at(p); }
  int weight(std::size_t p, std::size_t issue, std::size_t option) const {
    return data_.weights[p][issue][option];
  }

  std::size_t party_index(const std::string& party_id) const {
    for (std::size_t p = 0; p < data_.parties.size(); ++p) {
      if (data_.parties[p].id == party_id) return p;
    }
    throw ValidationError("unknown party '" + party_id + "'");
  }

  std::size_t issue_index(const std::string& issue_id) const {
    for (std::size_t i = 0; i < data_.issues.size(); ++i) {
      if (data_.issues[i].id == issue_id) return i;
    }
    throw ValidationError("unknown issue '" + issue_id + "'");
  }

  // Product of option counts.
  std::size_t deal_space_size() const {
    std::size_t total = 1;
    for (const auto& issue : data_.issues) total *= issue.size();
    return total;
  }

  bool is_valid_deal(const Deal& deal) const {
    if (deal.size() != data_.issues.size()) return false;
    for (std::size_t i = 0; i < deal.size(); ++i) {
      if (deal[i] < 0 || static_cast<std::size_t>(deal[i]) >= data_.issues[i].size()) return false;
    }
    return true;
  }

  void check_deal(const Deal& deal) const {
    if (!is_valid_deal(deal)) throw ValidationError("malformed deal for game '" + data_.id + "'");
  }

 private:
  struct Unchecked {};
  Game(GameData data, Unchecked) : data_(std::move(data)) {}

  GameData data_;
};

inline std::vector<Diagnostic> validate_game_shape(const GameData& g) {
  std::vector<Diagnostic> out;
  if (g.issues.empty()) out.push_back({"issues", "at least one issue is required"});
  std::set<std::string> issue_ids;
  for (std::size_t i = 0; i < g.issues.size(); ++i) {
    const auto& issue = g.issues[i];
    const std::string path = "issues[" + std::to_string(i) + "]";
    if (issue.id.empty()) out.push_back({path + ".id", "issue id must not be empty"});
    if (!issue_ids.insert(issue.id).second) {
      out.push_back({path + ".id", "duplicate issue id '" + issue.id + "'"});
    }
    if (issue.options.size() < 2) out.push_back({path + ".options", "an issue needs at least 2 options"});
    std::set<std::string> labels(issue.options.begin(), issue.options.end());
    if (labels.size() != issue.options.size()) {
      out.push_back({path + ".options", "option labels must be unique within an issue"});
    }
  }
  if (g.parties.empty()) out.push_back({"parties", "at least one party is required"});
  std::set<std::string> party_ids;
  for (std::size_t p = 0; p < g.parties.size(); ++p) {
    if (!party_ids.insert(g.parties[p].id).second) {
      out.push_back({"parties[" + std::to_string(p) + "].id", "duplicate party id '" + g.parties[p].id + "'"});
    }
  }
  if (g.weights.size() != g.parties.size()) {
    out.push_back({"weights", "expected a score table for each of the " + std::to_string(g.parties.size()) +
                                  " parties, found " + std::to_string(g.weights.size())});
  } else {
    for (std::size_t p = 0; p < g.parties.size(); ++p) {
      const std::string path = "weights." + g.parties[p].id;
      if (g.weights[p].size() != g.issues.size()) {
        out.push_back({path, "expected " + std::to_string(g.issues.size()) + " issues"});
        continue;
      }
      for (std::size_t i = 0; i < g.issues.size(); ++i) {
        if (g.weights[p][i].size() != g.issues[i].size()) {
          out.push_back({path + "." + g.issues[i].id, "expected " + std::to_string(g.issues[i].size()) +
                                                          " option weights, found " +
                                                          std::to_string(g.weights[p][i].size())});
        }
      }
    }
  }
  if (g.initial_deal.size() != g.issues.size()) {
    out.push_back({"initial_deal", "must assign exactly one option to every issue"});
  } else {
    for (std::size_t i = 0; i < g.issues.size(); ++i) {
      const int o = g.initial_deal[i];
      if (o < 0 || static_cast<std::size_t>(o) >= g.issues[i].size()) {
        out.push_back({"initial_deal." + g.issues[i].id, "option out of range"});
      }
    }
  }
  if (g.rounds < 1) out.push_back({"rounds", "must be at least 1"});
  return out;
}

inline std::vector<Diagnostic> validate_game_data(const GameData& g) {
  auto out = validate_game_shape(g);
  if (!out.empty()) return out;

  if (g.parties.size() < 3) {
    out.push_back({"parties", "a game needs at least 3 parties, found " + std::to_string(g.parties.size())});
  }
  std::size_t veto_count = 0;
  for (std::size_t p = 0; p < g.parties.size(); ++p) {
    const auto& party = g.parties[p];
    const std::string path = "parties[" + std::to_string(p) + "]";
    if (party.id.empty()) out.push_back({path + ".id", "party id must not be empty"});
    if (party.threshold < 0 || party.threshold > kMaxUtility) {
      out.push_back({path + ".threshold", "threshold " + std::to_string(party.threshold) + " outside [0,100]"});
    }
    if (party.veto) ++veto_count;
    if (p < 2 && !party.veto) {
      out.push_back({path + ".veto", "party '" + party.id + "' is listed as p" + std::to_string(p + 1) +
                                         " and must hold a veto"});
    }
  }
  if (veto_count != 2) {
    out.push_back({"parties", "exactly two veto parties are required, found " + std::to_string(veto_count)});
  }
  for (std::size_t p = 0; p < g.parties.size(); ++p) {
    const std::string path = "weights." + g.parties[p].id;
    int best_total = 0;
    for (std::size_t i = 0; i < g.issues.size(); ++i) {
      const auto& row = g.weights[p][i];
      for (std::size_t o = 0; o < row.size(); ++o) {
        if (row[o] < 0) {
          out.push_back({path + "." + g.issues[i].id + "[" + std::to_string(o) + "]", "negative weight"});
        }
      }
      best_total += *std::max_element(row.begin(), row.end());
    }
    if (best_total != kMaxUtility) {
      out.push_back({path, "party '" + g.parties[p].id + "' best-case score sums to " +
                               std::to_string(best_total) + ", expected 100"});
    }
  }
  for (const auto& [group, members] : g.party_groups) {
    for (const auto& member : members) {
      const bool known = std::any_of(g.parties.begin(), g.parties.end(),
                                     [&](const Party& party) { return party.id == member; });
      if (!known) out.push_back({"party_groups." + group, "unknown party '" + member + "'"});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scoring

inline int score(const ScoreTable& table, const Deal& deal) {
  int total = 0;
  for (std::size_t i = 0; i < deal.size(); ++i) total += table[i][deal[i]];
  return total;
}

inline int utility(const Game& game, std::size_t party, const Deal& deal) {
  game.check_deal(deal);
  if (party >= game.num_parties()) throw ValidationError("party index out of range");
  return score(game.scores(party), deal);
}

inline int utility(const Game& game, const std::string& party_id, const Deal& deal) {
  return utility(game, game.party_index(party_id), deal);
}

inline std::vector<int> utilities(const Game& game, const Deal& deal) {
  game.check_deal(deal);
  std::vector<int> out(game.num_parties());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = score(game.scores(p), deal);
  return out;
}

// Acceptance over a precomputed utility vector (party order as in the game).
inline bool acceptable_utilities(const Game& game, const std::vector<int>& u) {
  std::size_t below = 0;
  for (std::size_t p = 0; p < u.size(); ++p) {
    if (u[p] < game.party(p).threshold) {
      if (game.party(p).veto) return false;
      ++below;
    }
  }
  return below <= 1;
}

inline bool hard_acceptable_utilities(const Game& game, const std::vector<int>& u) {
  for (std::size_t p = 0; p < u.size(); ++p) {
    if (u[p] < game.party(p).threshold) return false;
  }
  return true;
}

// Both veto parties at or above threshold and at most one party below.
inline bool is_acceptable(const Game& game, const Deal& deal) {
  return acceptable_utilities(game, utilities(game, deal));
}

// Every party at or above threshold.
inline bool is_hard_acceptable(const Game& game, const Deal& deal) {
  return hard_acceptable_utilities(game, utilities(game, deal));
}

// ---------------------------------------------------------------------------
// Transforms

inline Game scale_thresholds(const Game& game, int delta) {
  GameData data = game.data();
  for (auto& party : data.parties) {
    party.threshold = std::clamp(party.threshold + delta, 0, kMaxUtility);
  }
  return Game::unchecked(std::move(data));
}

// Keeps the listed parties in their original order. Both veto parties must stay.
inline Game restrict_players(const Game& game, const std::set<std::string>& keep) {
  for (std::size_t p = 0; p < game.num_parties(); ++p) {
    if (game.party(p).veto && !keep.count(game.party(p).id)) {
      throw ValidationError("cannot drop veto party '" + game.party(p).id + "'");
    }
  }
  for (const auto& id : keep) game.party_index(id);
  if (keep.size() < 3) throw ValidationError("a restricted game needs at least 3 parties");

  GameData data = game.data();
  data.parties.clear();
  data.weights.clear();
  for (std::size_t p = 0; p < game.num_parties(); ++p) {
    if (!keep.count(game.party(p).id)) continue;
    data.parties.push_back(game.party(p));
    data.weights.push_back(game.scores(p));
  }
  for (auto& [group, members] : data.party_groups) {
    std::erase_if(members, [&](const std::string& id) { return !keep.count(id); });
  }
  return Game::unchecked(std::move(data));
}

}  // namespace scoreable
