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

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "scoreable/game.hpp"
#include "scoreable/rng.hpp"

namespace scoreable {

struct RosterEntry {
  std::string id;
  std::string name;
  bool veto = false;
};

// Everything one party is allowed to know about the game: public structure
// plus its own score table and threshold. Never another party's scores.
struct PartyView {
  std::string game_id;
  std::string setting_text;
  std::vector<Issue> issues;
  std::vector<RosterEntry> roster;
  std::size_t self = 0;
  Party party;
  ScoreTable scores;
  int rounds = 0;

  int threshold() const { return party.threshold; }
};

inline PartyView make_party_view(const Game& game, std::size_t p) {
  PartyView v;
  v.game_id = game.id();
  v.setting_text = game.data().setting_text;
  v.issues = game.issues();
  for (const auto& party : game.parties()) v.roster.push_back({party.id, party.name, party.veto});
  v.self = p;
  v.party = game.party(p);
  v.scores = game.scores(p);
  v.rounds = game.rounds();
  return v;
}

// A public answer as seen by every party.
struct PublicMessage {
  std::size_t turn = 0;
  std::string speaker;  // party id
  std::string text;
  std::optional<Deal> deal;
};

struct TurnContext {
  const PartyView& view;
  std::span<const PublicMessage> history;
  std::size_t turn = 0;
  bool final_turn = false;
  const std::string& prompt;
  Rng& rng;
};

// Raised by agents whose backing service failed after exhausting retries.
class TransportError : public std::runtime_error {
 public:
  TransportError(const std::string& what, int attempts, int status = 0)
      : std::runtime_error(what), attempts_(attempts), status_(status) {}
  int attempts() const { return attempts_; }
  int status() const { return status_; }

 private:
  int attempts_;
  int status_;
};

// Produces the raw response text for one turn. Implementations keep no
// state between turns; everything they need arrives in the context.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string respond(const TurnContext& context) = 0;
};

}  // namespace scoreable
