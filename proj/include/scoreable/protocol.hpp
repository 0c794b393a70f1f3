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

// One negotiation session: p1's anchor proposal at turn 0, R speaking turns
// in block-shuffled order, and p1's final proposal at turn R+1.

#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scoreable/agent.hpp"
#include "scoreable/game.hpp"
#include "scoreable/game_io.hpp"
#include "scoreable/parsing.hpp"
#include "scoreable/prompt.hpp"
#include "scoreable/rng.hpp"

namespace scoreable {

enum class Termination { kCompleted, kFailedNoPublicAnswer, kFailedTransport };

inline std::string to_string(Termination t) {
  switch (t) {
    case Termination::kCompleted: return "completed";
    case Termination::kFailedNoPublicAnswer: return "failed_no_public_answer";
    case Termination::kFailedTransport: return "failed_transport";
  }
  return "?";
}

inline Termination termination_from_string(const std::string& s) {
  if (s == "completed") return Termination::kCompleted;
  if (s == "failed_no_public_answer") return Termination::kFailedNoPublicAnswer;
  if (s == "failed_transport") return Termination::kFailedTransport;
  throw ValidationError("unknown termination '" + s + "'");
}

struct TurnEvent {
  std::size_t index = 0;
  std::string speaker;  // party id
  std::string raw;
  AgentResponse response;
  std::optional<std::string> timestamp;  // only when recording is enabled

  const std::optional<Deal>& proposed_deal() const { return response.deal; }
};

struct LeakEvent {
  std::size_t turn = 0;
  std::string keyword;

  bool operator==(const LeakEvent&) const = default;
};

struct Transcript {
  std::string game_id;
  std::uint64_t seed = 0;
  int rounds = 0;
  std::vector<TurnEvent> turns;
  Termination termination = Termination::kCompleted;
  std::optional<std::size_t> failed_turn;
  std::string failure_detail;
  std::optional<Deal> final_deal;
  std::vector<LeakEvent> leak_events;

  bool failed() const { return termination != Termination::kCompleted; }
};

struct SessionOptions {
  std::uint64_t seed = 0;
  ParseOptions parse;
  std::map<std::string, Incentive> incentives;  // missing parties are cooperative
  AblationConfig ablation;
  std::optional<std::size_t> history_window;  // last k public answers; unset = all
  std::chrono::milliseconds timeout{0};      // zero disables the session clock
  bool record_timestamps = false;
  const PromptTemplates* templates = nullptr;  // prompts are empty without templates
};

using AgentRoster = std::map<std::string, std::shared_ptr<Agent>>;

// R speaker indices built from shuffled permutations of all parties. A block
// whose first speaker repeats the previous block's last speaker is reshuffled.
inline std::vector<std::size_t> build_turn_order(std::size_t n_parties, int rounds, Rng& rng) {
  std::vector<std::size_t> order;
  if (rounds <= 0 || n_parties == 0) return order;
  order.reserve(static_cast<std::size_t>(rounds));
  std::vector<std::size_t> block(n_parties);
  while (order.size() < static_cast<std::size_t>(rounds)) {
    for (std::size_t p = 0; p < n_parties; ++p) block[p] = p;
    rng.shuffle(block);
    while (n_parties > 1 && !order.empty() && block.front() == order.back()) rng.shuffle(block);
    for (std::size_t p : block) {
      if (order.size() == static_cast<std::size_t>(rounds)) break;
      order.push_back(p);
    }
  }
  return order;
}

inline std::vector<std::string> build_turn_order(const Game& game, std::uint64_t seed) {
  Rng rng = Rng::derive(seed, 0);
  std::vector<std::string> out;
  for (std::size_t p : build_turn_order(game.num_parties(), game.rounds(), rng)) out.push_back(game.party(p).id);
  return out;
}

// Public answers of turns [0, upto). Private sections never appear.
inline std::vector<PublicMessage> visible_history(const Transcript& transcript, std::size_t upto) {
  std::vector<PublicMessage> out;
  for (const auto& ev : transcript.turns) {
    if (ev.index >= upto) break;
    if (ev.response.public_answer) {
      out.push_back({ev.index, ev.speaker, *ev.response.public_answer, ev.response.deal});
    }
  }
  return out;
}

namespace detail {

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace detail

inline std::string anchor_text(const Game& game) {
  return "<ANSWER>" + serialize_deal(game.initial_deal(), game) + "</ANSWER>";
}

inline Transcript run_session(const Game& game, const AgentRoster& agents, const SessionOptions& options) {
  for (const auto& party : game.parties()) {
    auto it = agents.find(party.id);
    if (it == agents.end() || !it->second) throw ValidationError("no agent assigned to party '" + party.id + "'");
  }
  for (const auto& [id, incentive] : options.incentives) check_incentive(incentive, game, id);

  Transcript tr;
  tr.game_id = game.id();
  tr.seed = options.seed;
  tr.rounds = game.rounds();

  Rng order_rng = Rng::derive(options.seed, 0);
  const auto order = build_turn_order(game.num_parties(), game.rounds(), order_rng);
  const std::size_t last_turn = static_cast<std::size_t>(game.rounds()) + 1;
  const auto started = std::chrono::steady_clock::now();

  std::vector<PartyView> views;
  for (std::size_t p = 0; p < game.num_parties(); ++p) views.push_back(make_party_view(game, p));

  std::vector<PublicMessage> history;
  auto record = [&](std::size_t t, std::size_t speaker, std::string raw) {
    TurnEvent ev;
    ev.index = t;
    ev.speaker = game.party(speaker).id;
    ev.response = parse_agent_output(raw, game, options.parse);
    ev.raw = std::move(raw);
    if (options.record_timestamps) ev.timestamp = detail::utc_timestamp();
    for (const auto& kw : ev.response.leaked_keywords) tr.leak_events.push_back({t, kw});
    if (ev.response.public_answer) {
      history.push_back({t, ev.speaker, *ev.response.public_answer, ev.response.deal});
    }
    tr.turns.push_back(std::move(ev));
    return tr.turns.back().response.public_answer.has_value();
  };

  record(0, 0, anchor_text(game));

  for (std::size_t t = 1; t <= last_turn; ++t) {
    const std::size_t speaker = t == last_turn ? 0 : order[t - 1];
    const bool final_turn = t == last_turn;
    if (options.timeout.count() > 0 && std::chrono::steady_clock::now() - started > options.timeout) {
      tr.termination = Termination::kFailedTransport;
      tr.failed_turn = t;
      tr.failure_detail = "session timeout";
      return tr;
    }

    std::span<const PublicMessage> visible(history);
    if (options.history_window && visible.size() > *options.history_window) {
      visible = visible.last(*options.history_window);
    }
    const std::string& party_id = game.party(speaker).id;
    Incentive incentive;
    if (auto it = options.incentives.find(party_id); it != options.incentives.end()) incentive = it->second;
    const std::string prompt = options.templates
                                   ? build_prompt(views[speaker], incentive, options.ablation, visible,
                                                  *options.templates, final_turn)
                                   : std::string();
    Rng turn_rng = Rng::derive(options.seed, 1000 + t);
    TurnContext ctx{views[speaker], visible, t, final_turn, prompt, turn_rng};

    std::string raw;
    try {
      raw = agents.at(party_id)->respond(ctx);
    } catch (const std::exception& e) {
      tr.termination = Termination::kFailedTransport;
      tr.failed_turn = t;
      tr.failure_detail = e.what();
      return tr;
    }
    if (!record(t, speaker, std::move(raw))) {
      tr.termination = Termination::kFailedNoPublicAnswer;
      tr.failed_turn = t;
      return tr;
    }
  }
  tr.final_deal = tr.turns.back().response.deal;
  return tr;
}

// ---------------------------------------------------------------------------
// Persistence. Field names are stable; see docs/transcript_format.md.

inline json transcript_to_json(const Transcript& tr, const Game& game) {
  json doc;
  doc["schema"] = "scoreable.transcript.v1";
  doc["game_id"] = tr.game_id;
  doc["seed"] = tr.seed;
  doc["rounds"] = tr.rounds;
  doc["termination"] = to_string(tr.termination);
  doc["failed_turn"] = tr.failed_turn ? json(*tr.failed_turn) : json(nullptr);
  doc["failure_detail"] = tr.failure_detail;
  doc["final_deal"] = tr.final_deal ? json(serialize_deal(*tr.final_deal, game)) : json(nullptr);
  doc["turns"] = json::array();
  for (const auto& ev : tr.turns) {
    json t;
    t["index"] = ev.index;
    t["speaker"] = ev.speaker;
    t["raw"] = ev.raw;
    t["scratchpad"] = ev.response.scratchpad ? json(*ev.response.scratchpad) : json(nullptr);
    t["plan"] = ev.response.plan ? json(*ev.response.plan) : json(nullptr);
    t["public"] = ev.response.public_answer ? json(*ev.response.public_answer) : json(nullptr);
    t["deal"] = ev.response.deal ? json(serialize_deal(*ev.response.deal, game)) : json(nullptr);
    t["flags"] = ev.response.flags;
    t["leaked"] = ev.response.leaked;
    t["leak_keywords"] = ev.response.leaked_keywords;
    if (ev.timestamp) t["timestamp"] = *ev.timestamp;
    doc["turns"].push_back(std::move(t));
  }
  doc["leak_events"] = json::array();
  for (const auto& le : tr.leak_events) doc["leak_events"].push_back({{"turn", le.turn}, {"keyword", le.keyword}});
  return doc;
}

inline Transcript transcript_from_json(const json& doc, const Game& game) {
  auto opt_string = [](const json& v) -> std::optional<std::string> {
    if (v.is_null()) return std::nullopt;
    return v.get<std::string>();
  };
  auto opt_deal = [&](const json& v) -> std::optional<Deal> {
    if (v.is_null()) return std::nullopt;
    auto d = parse_deal(v.get<std::string>(), game);
    if (!d) throw ValidationError("transcript deal '" + v.get<std::string>() + "' does not fit game '" + game.id() + "'");
    return d;
  };
  Transcript tr;
  tr.game_id = doc.at("game_id").get<std::string>();
  tr.seed = doc.at("seed").get<std::uint64_t>();
  tr.rounds = doc.at("rounds").get<int>();
  tr.termination = termination_from_string(doc.at("termination").get<std::string>());
  if (!doc.at("failed_turn").is_null()) tr.failed_turn = doc.at("failed_turn").get<std::size_t>();
  tr.failure_detail = doc.value("failure_detail", "");
  tr.final_deal = opt_deal(doc.at("final_deal"));
  for (const auto& t : doc.at("turns")) {
    TurnEvent ev;
    ev.index = t.at("index").get<std::size_t>();
    ev.speaker = t.at("speaker").get<std::string>();
    ev.raw = t.at("raw").get<std::string>();
    ev.response.scratchpad = opt_string(t.at("scratchpad"));
    ev.response.plan = opt_string(t.at("plan"));
    ev.response.public_answer = opt_string(t.at("public"));
    ev.response.deal = opt_deal(t.at("deal"));
    ev.response.flags = t.at("flags").get<std::set<std::string>>();
    ev.response.leaked = t.at("leaked").get<bool>();
    ev.response.leaked_keywords = t.at("leak_keywords").get<std::vector<std::string>>();
    if (t.contains("timestamp")) ev.timestamp = t.at("timestamp").get<std::string>();
    tr.turns.push_back(std::move(ev));
  }
  for (const auto& le : doc.at("leak_events")) {
    tr.leak_events.push_back({le.at("turn").get<std::size_t>(), le.at("keyword").get<std::string>()});
  }
  return tr;
}

}  // namespace scoreable
