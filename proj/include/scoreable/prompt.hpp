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

// Prompt composition. All prose lives in plain-text template files (see
// templates/README.md); this header only decides which pieces to include and
// fills {{placeholders}}.

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scoreable/agent.hpp"
#include "scoreable/game_io.hpp"
#include "scoreable/parsing.hpp"

namespace scoreable {

enum class IncentiveKind { kCooperative, kGreedy, kAdversarialUntargeted, kAdversarialTargeted };

struct Incentive {
  IncentiveKind kind = IncentiveKind::kCooperative;
  std::optional<std::string> target;  // party id, only for kAdversarialTargeted

  bool operator==(const Incentive&) const = default;
};

inline std::string to_string(const Incentive& inc) {
  switch (inc.kind) {
    case IncentiveKind::kCooperative: return "cooperative";
    case IncentiveKind::kGreedy: return "greedy";
    case IncentiveKind::kAdversarialUntargeted: return "adversarial";
    case IncentiveKind::kAdversarialTargeted: return "adversarial:" + inc.target.value_or("");
  }
  return "?";
}

// "cooperative" | "greedy" | "adversarial" | "adversarial:<party-id>"
inline Incentive parse_incentive(std::string_view text) {
  if (text == "cooperative" || text == "compromising") return {};
  if (text == "greedy") return {IncentiveKind::kGreedy, std::nullopt};
  if (text == "adversarial" || text == "untargeted") return {IncentiveKind::kAdversarialUntargeted, std::nullopt};
  constexpr std::string_view kTargeted = "adversarial:";
  if (text.substr(0, kTargeted.size()) == kTargeted && text.size() > kTargeted.size()) {
    return {IncentiveKind::kAdversarialTargeted, std::string(text.substr(kTargeted.size()))};
  }
  throw ValidationError("unknown incentive '" + std::string(text) + "'");
}

inline void check_incentive(const Incentive& inc, const Game& game, const std::string& self) {
  const bool targeted = inc.kind == IncentiveKind::kAdversarialTargeted;
  if (targeted != inc.target.has_value()) {
    throw ValidationError("a target is required for, and only for, targeted adversarial incentives");
  }
  if (targeted) {
    if (*inc.target == self) throw ValidationError("party '" + self + "' cannot target itself");
    game.party_index(*inc.target);
  }
}

// Chain-of-thought components; true means the component is present.
struct AblationConfig {
  bool prev_deals = true;
  bool others_prefer = true;
  bool candidates = true;
  bool planning = true;

  bool operator==(const AblationConfig&) const = default;
};

// All 16 configurations, ordered as rows of the ablation table: the full
// prompt first, then counting down with planning as the fastest-changing flag.
inline std::array<AblationConfig, 16> all_ablation_configs() {
  std::array<AblationConfig, 16> out{};
  for (unsigned i = 0; i < 16; ++i) {
    out[i] = {(i & 8u) == 0, (i & 4u) == 0, (i & 2u) == 0, (i & 1u) == 0};
  }
  return out;
}

// Compact "1111"-style code in flag order (prev, others, candidates, planning).
inline std::string to_string(const AblationConfig& a) {
  std::string s;
  for (bool b : {a.prev_deals, a.others_prefer, a.candidates, a.planning}) s += b ? '1' : '0';
  return s;
}

inline AblationConfig parse_ablation(std::string_view code) {
  if (code == "none" || code == "full") return {};
  if (code.size() != 4 || code.find_first_not_of("01") != std::string_view::npos) {
    throw ValidationError("ablation must be four 0/1 digits (prev, others, candidates, planning)");
  }
  return {code[0] == '1', code[1] == '1', code[2] == '1', code[3] == '1'};
}

// {{name}} substitution. Unknown placeholders are an error so template typos
// surface immediately.
inline std::string render_template(std::string_view text, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t open = text.find("{{", pos);
    if (open == std::string_view::npos) break;
    const std::size_t close = text.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    out.append(text.substr(pos, open - pos));
    const std::string key(text.substr(open + 2, close - open - 2));
    auto it = values.find(key);
    if (it == values.end()) throw ValidationError("unknown template placeholder '{{" + key + "}}'");
    out += it->second;
    pos = close + 2;
  }
  out.append(text.substr(pos));
  return out;
}

struct PromptTemplates {
  std::string negotiation;
  std::string format_rules;
  std::string score_line;
  std::string history_entry;
  std::string history_empty;
  std::string turn_regular;
  std::string turn_final;
  std::map<IncentiveKind, std::string> incentive;
  std::string ablation_prev_deals;
  std::string ablation_others_prefer;
  std::string ablation_candidates;
  std::string ablation_planning;
  std::string generation_original;
  std::string generation_alternative;
  std::string dry_run_reply;

  static PromptTemplates load(const std::filesystem::path& dir) {
    auto read = [&](const char* name) {
      std::string text = read_text_file(dir / name);
      while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
      return text;
    };
    PromptTemplates t;
    t.negotiation = read("negotiation.txt");
    t.format_rules = read("format_rules.txt");
    t.score_line = read("score_line.txt");
    t.history_entry = read("history_entry.txt");
    t.history_empty = read("history_empty.txt");
    t.turn_regular = read("turn_regular.txt");
    t.turn_final = read("turn_final.txt");
    t.incentive[IncentiveKind::kCooperative] = read("incentive_cooperative.txt");
    t.incentive[IncentiveKind::kGreedy] = read("incentive_greedy.txt");
    t.incentive[IncentiveKind::kAdversarialUntargeted] = read("incentive_adversarial_untargeted.txt");
    t.incentive[IncentiveKind::kAdversarialTargeted] = read("incentive_adversarial_targeted.txt");
    t.ablation_prev_deals = read("ablation_prev_deals.txt");
    t.ablation_others_prefer = read("ablation_others_prefer.txt");
    t.ablation_candidates = read("ablation_candidates.txt");
    t.ablation_planning = read("ablation_planning.txt");
    t.generation_original = read("generation_original.txt");
    t.generation_alternative = read("generation_alternative.txt");
    t.dry_run_reply = read("dry_run_reply.txt");
    return t;
  }

  // Fragments for the enabled flags, in flag order.
  std::vector<std::string_view> ablation_fragments(const AblationConfig& a) const {
    std::vector<std::string_view> out;
    if (a.prev_deals) out.push_back(ablation_prev_deals);
    if (a.others_prefer) out.push_back(ablation_others_prefer);
    if (a.candidates) out.push_back(ablation_candidates);
    if (a.planning) out.push_back(ablation_planning);
    return out;
  }
};

inline std::string render_score_sheet(const PartyView& view, const PromptTemplates& t) {
  std::string out;
  for (std::size_t i = 0; i < view.issues.size(); ++i) {
    const auto& issue = view.issues[i];
    for (std::size_t o = 0; o < issue.size(); ++o) {
      if (!out.empty()) out += '\n';
      out += render_template(t.score_line, {{"issue", issue.id},
                                            {"issue_name", issue.name},
                                            {"option", issue.id + std::to_string(o + 1)},
                                            {"option_label", issue.options[o]},
                                            {"points", std::to_string(view.scores[i][o])}});
    }
  }
  return out;
}

inline std::string render_history(std::span<const PublicMessage> history, const PartyView& view,
                                  const PromptTemplates& t) {
  if (history.empty()) return t.history_empty;
  std::string out;
  for (const auto& msg : history) {
    std::string name = msg.speaker;
    for (const auto& r : view.roster) {
      if (r.id == msg.speaker) name = r.name;
    }
    if (!out.empty()) out += '\n';
    out += render_template(t.history_entry, {{"turn", std::to_string(msg.turn)}, {"speaker", name}, {"text", msg.text}});
  }
  return out;
}

inline std::string build_prompt(const PartyView& view, const Incentive& incentive, const AblationConfig& ablation,
                                std::span<const PublicMessage> history, const PromptTemplates& t,
                                bool final_turn = false) {
  std::string target_name;
  if (incentive.target) {
    target_name = *incentive.target;
    for (const auto& r : view.roster) {
      if (r.id == *incentive.target) target_name = r.name;
    }
  }
  std::string parties;
  for (const auto& r : view.roster) {
    if (!parties.empty()) parties += ", ";
    parties += r.name;
    if (r.veto) parties += " (veto)";
  }

  std::string reasoning;
  for (auto fragment : t.ablation_fragments(ablation)) {
    if (!reasoning.empty()) reasoning += "\n\n";
    reasoning += fragment;
  }

  const std::map<std::string, std::string> values = {
      {"setting", view.setting_text},
      {"party_name", view.party.name},
      {"parties", parties},
      {"role", view.party.role_text},
      {"score_sheet", render_score_sheet(view, t)},
      {"threshold", std::to_string(view.threshold())},
      {"format_rules", t.format_rules},
      {"incentive", render_template(t.incentive.at(incentive.kind), {{"target", target_name}})},
      {"reasoning", reasoning},
      {"history", render_history(history, view, t)},
      {"turn_instruction", final_turn ? t.turn_final : t.turn_regular},
  };
  return render_template(t.negotiation, values);
}

}  // namespace scoreable
