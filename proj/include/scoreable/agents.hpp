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

// Agent implementations: rule-based baselines, scripted replay, and the
// chat-endpoint adapter.

#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "scoreable/agent.hpp"
#include "scoreable/chat_client.hpp"
#include "scoreable/parsing.hpp"

namespace scoreable {

namespace detail {

inline int best_option(const std::vector<int>& row) {
  return static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
}

// Walks issues in the given order, jumping each to the party's best option,
// until the party's score reaches its threshold or the order is exhausted.
inline Deal improve_in_order(const PartyView& view, Deal deal, const std::vector<std::size_t>& order) {
  int u = score(view.scores, deal);
  if (u >= view.threshold()) return deal;
  for (std::size_t i : order) {
    deal.choice[i] = best_option(view.scores[i]);
    u = score(view.scores, deal);
    if (u >= view.threshold()) break;
  }
  return deal;
}

}  // namespace detail

// Random-sequence baseline: issues are improved in a uniformly random order.
inline Deal baseline_propose(const PartyView& view, const Deal& previous, Rng& rng) {
  std::vector<std::size_t> order(view.issues.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  return detail::improve_in_order(view, previous, order);
}

// Priority baseline: issues by descending best-option weight, ties by issue id.
inline Deal baseline_priority_propose(const PartyView& view, const Deal& previous) {
  std::vector<std::size_t> order(view.issues.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const int wa = *std::max_element(view.scores[a].begin(), view.scores[a].end());
    const int wb = *std::max_element(view.scores[b].begin(), view.scores[b].end());
    if (wa != wb) return wa > wb;
    return view.issues[a].id < view.issues[b].id;
  });
  return detail::improve_in_order(view, previous, order);
}

// Same tag layout as model output, so baseline turns go through the same parser.
inline std::string format_proposal(const PartyView& view, const Deal& previous, const Deal& proposal) {
  return "<SCRATCHPAD>Previous deal " + serialize_deal(previous, view.issues) + " scores " +
         std::to_string(score(view.scores, previous)) + "; my proposal scores " +
         std::to_string(score(view.scores, proposal)) + ".</SCRATCHPAD>\n<ANSWER>I propose: " +
         serialize_deal(proposal, view.issues) + "</ANSWER>";
}

class BaselineAgent : public Agent {
 public:
  enum class Ordering { kRandom, kPriority };

  explicit BaselineAgent(Ordering ordering = Ordering::kRandom) : ordering_(ordering) {}

  std::string respond(const TurnContext& ctx) override {
    Deal previous(std::vector<int>(ctx.view.issues.size(), 0));
    for (auto it = ctx.history.rbegin(); it != ctx.history.rend(); ++it) {
      if (it->deal) {
        previous = *it->deal;
        break;
      }
    }
    const Deal proposal = ordering_ == Ordering::kRandom ? baseline_propose(ctx.view, previous, ctx.rng)
                                                          : baseline_priority_propose(ctx.view, previous);
    return format_proposal(ctx.view, previous, proposal);
  }

 private:
  Ordering ordering_;
};

// Replays fixed texts keyed by turn index; turns without a script get
// `fallback`.
class ScriptedAgent : public Agent {
 public:
  explicit ScriptedAgent(std::map<std::size_t, std::string> by_turn, std::string fallback = {})
      : by_turn_(std::move(by_turn)), fallback_(std::move(fallback)) {}

  std::string respond(const TurnContext& ctx) override {
    auto it = by_turn_.find(ctx.turn);
    return it == by_turn_.end() ? fallback_ : it->second;
  }

 private:
  std::map<std::size_t, std::string> by_turn_;
  std::string fallback_;
};

class ChatAgent : public Agent {
 public:
  ChatAgent(std::shared_ptr<ChatClient> client, SamplingParams sampling = {})
      : client_(std::move(client)), sampling_(sampling) {}

  std::string respond(const TurnContext& ctx) override { return client_->complete(ctx.prompt, sampling_).text; }

 private:
  std::shared_ptr<ChatClient> client_;
  SamplingParams sampling_;
};

}  // namespace scoreable
