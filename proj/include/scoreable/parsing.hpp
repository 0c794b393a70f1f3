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

// Agent output parsing: private/public section extraction with salvage of
// malformed answers, structural leak detection, and the deal string grammar
// (see docs/deal_grammar.md).

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "scoreable/game.hpp"

namespace scoreable {

inline const std::vector<std::string>& default_illegal_keywords() {
  static const std::vector<std::string> kKeywords = {"<PLAN>", "</PLAN>", "<SCRATCHPAD>", "</SCRATCHPAD>"};
  return kKeywords;
}

enum class SalvageMode {
  kLenient,  // recover a public answer from malformed output
  kStrict,   // only a balanced, non-empty <ANSWER> block counts
};

struct ParseOptions {
  SalvageMode mode = SalvageMode::kLenient;
  std::vector<std::string> illegal_keywords = default_illegal_keywords();
};

namespace flag {
inline constexpr std::string_view kMissingAnswerTags = "missing_answer_tags";
inline constexpr std::string_view kSalvaged = "salvaged";
inline constexpr std::string_view kIllegalKeywordPrefix = "illegal_keyword:";
}  // namespace flag

struct AgentResponse {
  std::optional<std::string> scratchpad;
  std::optional<std::string> plan;
  std::optional<std::string> public_answer;
  std::optional<Deal> deal;
  std::set<std::string> flags;
  bool leaked = false;
  std::vector<std::string> leaked_keywords;  // lowercase, in keyword-list order

  bool has_flag(std::string_view f) const { return flags.count(std::string(f)) > 0; }
};

namespace detail {

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
inline bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
};

inline Span trimmed(std::string_view text, Span s) {
  while (s.begin < s.end && is_space(text[s.begin])) ++s.begin;
  while (s.end > s.begin && is_space(text[s.end - 1])) --s.end;
  return s;
}

struct Block {
  Span outer;  // including tags
  Span inner;
};

// Balanced <tag>...</tag> blocks in a lowercase haystack, non-overlapping,
// left to right. An opening tag with no later closing tag is skipped.
inline std::vector<Block> balanced_blocks(std::string_view lower, std::string_view open, std::string_view close) {
  std::vector<Block> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t o = lower.find(open, pos);
    if (o == std::string_view::npos) break;
    const std::size_t c = lower.find(close, o + open.size());
    if (c == std::string_view::npos) break;
    out.push_back({{o, c + close.size()}, {o + open.size(), c}});
    pos = c + close.size();
  }
  return out;
}

inline std::vector<std::size_t> find_all(std::string_view lower, std::string_view needle) {
  std::vector<std::size_t> out;
  for (std::size_t p = lower.find(needle); p != std::string_view::npos; p = lower.find(needle, p + 1)) {
    out.push_back(p);
  }
  return out;
}

inline bool inside_any(std::size_t pos, const std::vector<Block>& blocks) {
  return std::any_of(blocks.begin(), blocks.end(),
                     [&](const Block& b) { return pos >= b.outer.begin && pos < b.outer.end; });
}

}  // namespace detail

// Total over arbitrary input. Salvage tiers (lenient mode):
//   1. the last balanced <ANSWER> block with non-empty content;
//   2. an unbalanced <ANSWER> or </ANSWER> tag: the text it delimits;
//   3. the last non-empty stretch of text outside balanced private sections
//      and answer tags (the whole text when there are no tags at all).
// Tiers 2 and 3 set both missing_answer_tags and salvaged. The public answer
// is always a contiguous, whitespace-trimmed substring of the input.
inline AgentResponse parse_response(std::string_view raw, const ParseOptions& options = {}) {
  using detail::Block;
  using detail::Span;
  static constexpr std::string_view kAnswerOpen = "<answer>", kAnswerClose = "</answer>";
  static constexpr std::string_view kScratchOpen = "<scratchpad>", kScratchClose = "</scratchpad>";
  static constexpr std::string_view kPlanOpen = "<plan>", kPlanClose = "</plan>";

  AgentResponse out;
  const std::string lower = detail::ascii_lower(raw);

  const auto scratch = detail::balanced_blocks(lower, kScratchOpen, kScratchClose);
  const auto plans = detail::balanced_blocks(lower, kPlanOpen, kPlanClose);
  auto inner_text = [&](const Block& b) {
    const Span s = detail::trimmed(raw, b.inner);
    return std::string(raw.substr(s.begin, s.end - s.begin));
  };
  if (!scratch.empty()) out.scratchpad = inner_text(scratch.front());
  if (!plans.empty()) out.plan = inner_text(plans.front());

  std::vector<Block> privates = scratch;
  privates.insert(privates.end(), plans.begin(), plans.end());
  std::sort(privates.begin(), privates.end(),
            [](const Block& a, const Block& b) { return a.outer.begin < b.outer.begin; });

  std::optional<Span> answer;

  const auto answers = detail::balanced_blocks(lower, kAnswerOpen, kAnswerClose);
  for (auto it = answers.rbegin(); it != answers.rend(); ++it) {
    const Span s = detail::trimmed(raw, it->inner);
    if (s.end > s.begin) {
      answer = s;
      break;
    }
  }

  if (!answer && options.mode == SalvageMode::kStrict) {
    out.flags.insert(std::string(flag::kMissingAnswerTags));
  }

  if (!answer && options.mode == SalvageMode::kLenient) {
    auto in_balanced_answer = [&](std::size_t pos) { return detail::inside_any(pos, answers); };
    std::vector<std::size_t> stray_opens, stray_closes;
    for (std::size_t p : detail::find_all(lower, kAnswerOpen)) {
      if (!in_balanced_answer(p)) stray_opens.push_back(p);
    }
    for (std::size_t p : detail::find_all(lower, kAnswerClose)) {
      if (!in_balanced_answer(p)) stray_closes.push_back(p);
    }

    if (!stray_opens.empty()) {
      const std::size_t begin = stray_opens.back() + kAnswerOpen.size();
      std::size_t end = lower.size();
      for (std::string_view stop : {kScratchOpen, kPlanOpen}) {
        const std::size_t p = lower.find(stop, begin);
        if (p != std::string::npos) end = std::min(end, p);
      }
      const Span s = detail::trimmed(raw, {begin, end});
      if (s.end > s.begin) answer = s;
    }
    if (!answer && !stray_closes.empty()) {
      const std::size_t end = stray_closes.back();
      std::size_t begin = 0;
      for (std::string_view tag : {kScratchOpen, kScratchClose, kPlanOpen, kPlanClose}) {
        const std::size_t p = lower.rfind(tag, end);
        if (p != std::string::npos && p + tag.size() <= end) begin = std::max(begin, p + tag.size());
      }
      const Span s = detail::trimmed(raw, {begin, end});
      if (s.end > s.begin) answer = s;
    }
    if (!answer) {
      // Separators: balanced private blocks and every answer tag occurrence.
      std::vector<Span> separators;
      for (const auto& b : privates) separators.push_back(b.outer);
      for (std::size_t p : detail::find_all(lower, kAnswerOpen)) separators.push_back({p, p + kAnswerOpen.size()});
      for (std::size_t p : detail::find_all(lower, kAnswerClose)) separators.push_back({p, p + kAnswerClose.size()});
      std::sort(separators.begin(), separators.end(),
                [](const Span& a, const Span& b) { return a.begin < b.begin; });
      std::vector<Span> gaps;
      std::size_t cursor = 0;
      for (const auto& sep : separators) {
        if (sep.begin > cursor) gaps.push_back({cursor, sep.begin});
        cursor = std::max(cursor, sep.end);
      }
      if (cursor < lower.size()) gaps.push_back({cursor, lower.size()});
      for (auto it = gaps.rbegin(); it != gaps.rend(); ++it) {
        const Span s = detail::trimmed(raw, *it);
        if (s.end > s.begin) {
          answer = s;
          break;
        }
      }
    }
    out.flags.insert(std::string(flag::kMissingAnswerTags));
    if (answer) out.flags.insert(std::string(flag::kSalvaged));
  }

  if (answer) {
    out.public_answer = std::string(raw.substr(answer->begin, answer->end - answer->begin));
    const std::string_view public_lower(lower.data() + answer->begin, answer->end - answer->begin);
    for (const auto& keyword : options.illegal_keywords) {
      const std::string kw = detail::ascii_lower(keyword);
      if (!kw.empty() && public_lower.find(kw) != std::string_view::npos) {
        out.leaked = true;
        out.leaked_keywords.push_back(kw);
        out.flags.insert(std::string(flag::kIllegalKeywordPrefix) + kw);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Deal grammar: <issue-id><n> items with optional '=' or ':' between id and
// number ("A1", "a=1", "B: 2"), any order, any non-alphanumeric separators
// (so "[A1, B2]" and "E5 d4 c3" both work). n is the one-based option number.

inline std::optional<Deal> parse_deal(std::string_view text, const std::vector<Issue>& issues) {
  const std::string lower = detail::ascii_lower(text);
  std::vector<std::size_t> order(issues.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return issues[a].id.size() > issues[b].id.size(); });
  std::vector<std::string> ids;
  for (const auto& issue : issues) ids.push_back(detail::ascii_lower(issue.id));

  std::vector<int> choice(issues.size(), -1);
  std::size_t i = 0;
  while (i < lower.size()) {
    if (i > 0 && detail::is_alnum(lower[i - 1])) {
      ++i;
      continue;
    }
    bool matched = false;
    for (std::size_t k : order) {
      const std::string& id = ids[k];
      if (id.empty() || lower.compare(i, id.size(), id) != 0) continue;
      std::size_t j = i + id.size();
      std::size_t probe = j;
      while (probe < lower.size() && lower[probe] == ' ') ++probe;
      if (probe < lower.size() && (lower[probe] == '=' || lower[probe] == ':')) {
        ++probe;
        while (probe < lower.size() && lower[probe] == ' ') ++probe;
        j = probe;
      }
      std::size_t digits_end = j;
      while (digits_end < lower.size() && std::isdigit(static_cast<unsigned char>(lower[digits_end]))) ++digits_end;
      if (digits_end == j) continue;
      if (digits_end < lower.size() && detail::is_alnum(lower[digits_end])) continue;
      if (digits_end - j > 6) return std::nullopt;
      const int number = std::stoi(lower.substr(j, digits_end - j));
      if (number < 1 || static_cast<std::size_t>(number) > issues[k].size()) return std::nullopt;
      const int option = number - 1;
      if (choice[k] != -1 && choice[k] != option) return std::nullopt;
      choice[k] = option;
      i = digits_end;
      matched = true;
      break;
    }
    if (!matched) ++i;
  }
  if (std::any_of(choice.begin(), choice.end(), [](int c) { return c < 0; })) return std::nullopt;
  return Deal(std::move(choice));
}

inline std::optional<Deal> parse_deal(std::string_view text, const Game& game) {
  return parse_deal(text, game.issues());
}

// Canonical form "A1, B2, C3, D4, E5", issues in game order.
inline std::string serialize_deal(const Deal& deal, const std::vector<Issue>& issues) {
  std::string out;
  for (std::size_t i = 0; i < issues.size() && i < deal.size(); ++i) {
    if (i) out += ", ";
    out += issues[i].id + std::to_string(deal[i] + 1);
  }
  return out;
}

inline std::string serialize_deal(const Deal& deal, const Game& game) {
  game.check_deal(deal);
  return serialize_deal(deal, game.issues());
}

// Parses the sections and, when a public answer exists, its deal.
inline AgentResponse parse_agent_output(std::string_view raw, const Game& game, const ParseOptions& options = {}) {
  AgentResponse out = parse_response(raw, options);
  if (out.public_answer) out.deal = parse_deal(*out.public_answer, game);
  return out;
}

}  // namespace scoreable
