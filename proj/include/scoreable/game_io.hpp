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

// Game config files. The JSON layout is documented in docs/game_config.md and
// games/game.schema.json; the legacy per-agent text layout in
// docs/legacy_format.md.

#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "scoreable/game.hpp"
#include "scoreable/parsing.hpp"

namespace scoreable {

using json = nlohmann::ordered_json;

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

namespace detail {

class JsonReader {
 public:
  std::vector<Diagnostic> diagnostics;

  const json* field(const json& obj, const std::string& key, const std::string& path, bool required = true) {
    if (!obj.is_object()) {
      diagnostics.push_back({path, "expected an object"});
      return nullptr;
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) diagnostics.push_back({join(path, key), "missing required field"});
      return nullptr;
    }
    return &*it;
  }

  std::string string(const json& obj, const std::string& key, const std::string& path, bool required = true) {
    const json* v = field(obj, key, path, required);
    if (!v) return {};
    if (!v->is_string()) {
      diagnostics.push_back({join(path, key), "expected a string"});
      return {};
    }
    return v->get<std::string>();
  }

  std::optional<int> integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) {
      diagnostics.push_back({path, "expected an integer"});
      return std::nullopt;
    }
    return v.get<int>();
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

}  // namespace detail

// Parses and structurally decodes a game document. Invariant violations are
// reported alongside decoding problems; a game is returned only when the
// list of diagnostics is empty.
struct GameLoadResult {
  std::optional<Game> game;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return game.has_value(); }
};

inline GameLoadResult game_from_json(const json& doc) {
  detail::JsonReader r;
  GameData g;
  if (!doc.is_object()) {
    return {std::nullopt, {{"", "game config must be a JSON object"}}};
  }
  g.id = r.string(doc, "id", "", false);
  g.setting_text = r.string(doc, "setting_text", "", true);

  if (const json* rounds = r.field(doc, "rounds", "", false)) {
    if (auto v = r.integer(*rounds, "rounds")) g.rounds = *v;
  }

  if (const json* issues = r.field(doc, "issues", "")) {
    if (!issues->is_array()) {
      r.diagnostics.push_back({"issues", "expected an array"});
    } else {
      for (std::size_t i = 0; i < issues->size(); ++i) {
        const std::string path = "issues[" + std::to_string(i) + "]";
        const json& item = (*issues)[i];
        Issue issue;
        issue.id = r.string(item, "id", path);
        issue.name = r.string(item, "name", path, false);
        if (const json* opts = r.field(item, "options", path)) {
          if (!opts->is_array()) {
            r.diagnostics.push_back({path + ".options", "expected an array of labels"});
          } else {
            for (const auto& o : *opts) {
              if (o.is_string()) {
                issue.options.push_back(o.get<std::string>());
              } else {
                r.diagnostics.push_back({path + ".options", "option labels must be strings"});
              }
            }
          }
        }
        g.issues.push_back(std::move(issue));
      }
    }
  }

  if (const json* parties = r.field(doc, "parties", "")) {
    if (!parties->is_array()) {
      r.diagnostics.push_back({"parties", "expected an array"});
    } else {
      for (std::size_t p = 0; p < parties->size(); ++p) {
        const std::string path = "parties[" + std::to_string(p) + "]";
        const json& item = (*parties)[p];
        Party party;
        party.id = r.string(item, "id", path);
        party.name = r.string(item, "name", path, false);
        if (party.name.empty()) party.name = party.id;
        party.role_text = r.string(item, "role_text", path, false);
        if (const json* veto = r.field(item, "veto", path, false)) {
          if (veto->is_boolean()) {
            party.veto = veto->get<bool>();
          } else {
            r.diagnostics.push_back({path + ".veto", "expected a boolean"});
          }
        }
        if (const json* t = r.field(item, "threshold", path)) {
          if (auto v = r.integer(*t, path + ".threshold")) party.threshold = *v;
        }
        g.parties.push_back(std::move(party));
      }
    }
  }

  if (const json* weights = r.field(doc, "weights", "")) {
    if (!weights->is_object()) {
      r.diagnostics.push_back({"weights", "expected an object keyed by party id"});
    } else {
      for (const auto& party : g.parties) {
        const std::string path = "weights." + party.id;
        ScoreTable table;
        auto pit = weights->find(party.id);
        if (pit == weights->end() || !pit->is_object()) {
          r.diagnostics.push_back({path, "missing score table for party '" + party.id + "'"});
          g.weights.push_back(std::move(table));
          continue;
        }
        for (const auto& issue : g.issues) {
          std::vector<int> row;
          auto iit = pit->find(issue.id);
          if (iit == pit->end() || !iit->is_array()) {
            r.diagnostics.push_back({path + "." + issue.id, "missing option weights"});
          } else {
            for (std::size_t o = 0; o < iit->size(); ++o) {
              auto v = r.integer((*iit)[o], path + "." + issue.id + "[" + std::to_string(o) + "]");
              row.push_back(v.value_or(0));
            }
          }
          table.push_back(std::move(row));
        }
        for (auto it = pit->begin(); it != pit->end(); ++it) {
          const bool known = std::any_of(g.issues.begin(), g.issues.end(),
                                         [&](const Issue& issue) { return issue.id == it.key(); });
          if (!known) r.diagnostics.push_back({path + "." + it.key(), "unknown issue"});
        }
        g.weights.push_back(std::move(table));
      }
      for (auto it = weights->begin(); it != weights->end(); ++it) {
        const bool known = std::any_of(g.parties.begin(), g.parties.end(),
                                       [&](const Party& party) { return party.id == it.key(); });
        if (!known) r.diagnostics.push_back({"weights." + it.key(), "unknown party"});
      }
    }
  }

  if (const json* deal = r.field(doc, "initial_deal", "")) {
    if (!deal->is_object()) {
      r.diagnostics.push_back({"initial_deal", "expected an object mapping issue id to option number"});
    } else {
      for (const auto& issue : g.issues) {
        auto it = deal->find(issue.id);
        if (it == deal->end()) {
          r.diagnostics.push_back({"initial_deal." + issue.id, "missing option for issue"});
          g.initial_deal.choice.push_back(-1);
          continue;
        }
        auto v = r.integer(*it, "initial_deal." + issue.id);
        // One-based in the file, zero-based in memory.
        g.initial_deal.choice.push_back(v ? *v - 1 : -1);
      }
    }
  }

  if (const json* groups = r.field(doc, "party_groups", "", false)) {
    if (!groups->is_object()) {
      r.diagnostics.push_back({"party_groups", "expected an object"});
    } else {
      for (auto it = groups->begin(); it != groups->end(); ++it) {
        if (!it->is_array()) {
          r.diagnostics.push_back({"party_groups." + it.key(), "expected an array of party ids"});
          continue;
        }
        auto& members = g.party_groups[it.key()];
        for (const auto& m : *it) {
          if (m.is_string()) members.push_back(m.get<std::string>());
        }
      }
    }
  }

  if (!r.diagnostics.empty()) return {std::nullopt, std::move(r.diagnostics)};
  auto diagnostics = validate_game_data(g);
  if (!diagnostics.empty()) return {std::nullopt, std::move(diagnostics)};
  return {Game(std::move(g)), {}};
}

inline json game_to_json(const Game& game) {
  const GameData& g = game.data();
  json doc;
  if (!g.id.empty()) doc["id"] = g.id;
  doc["setting_text"] = g.setting_text;
  doc["rounds"] = g.rounds;
  doc["issues"] = json::array();
  for (const auto& issue : g.issues) {
    doc["issues"].push_back({{"id", issue.id}, {"name", issue.name}, {"options", issue.options}});
  }
  doc["parties"] = json::array();
  for (const auto& party : g.parties) {
    doc["parties"].push_back({{"id", party.id},
                              {"name", party.name},
                              {"veto", party.veto},
                              {"threshold", party.threshold},
                              {"role_text", party.role_text}});
  }
  json weights = json::object();
  for (std::size_t p = 0; p < g.parties.size(); ++p) {
    json table = json::object();
    for (std::size_t i = 0; i < g.issues.size(); ++i) table[g.issues[i].id] = g.weights[p][i];
    weights[g.parties[p].id] = std::move(table);
  }
  doc["weights"] = std::move(weights);
  json deal = json::object();
  for (std::size_t i = 0; i < g.issues.size(); ++i) deal[g.issues[i].id] = g.initial_deal[i] + 1;
  doc["initial_deal"] = std::move(deal);
  if (!g.party_groups.empty()) doc["party_groups"] = g.party_groups;
  return doc;
}

// Reads and validates a config file; never throws for content problems.
inline GameLoadResult validate_game_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    return {std::nullopt, {{"", e.what()}}};
  }
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    return {std::nullopt, {{"", "ill-formed JSON in " + path.string()}}};
  }
  auto result = game_from_json(doc);
  if (result.game && result.game->id().empty()) {
    GameData data = result.game->data();
    data.id = path.parent_path().filename().string();
    if (data.id.empty()) data.id = path.stem().string();
    result.game = Game(std::move(data));
  }
  return result;
}

inline Game load_game(const std::filesystem::path& path) {
  auto result = validate_game_config(path);
  if (!result.ok()) throw ValidationError(std::move(result.diagnostics));
  return std::move(*result.game);
}

// ---------------------------------------------------------------------------
// Legacy per-agent text configs.

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

inline std::vector<std::string> non_empty_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace detail

struct LegacyConvertOptions {
  std::string game_id;
  std::optional<Deal> initial_deal;  // defaults to the first option of every issue
  int rounds = kDefaultRounds;
};

// Converts a legacy game directory:
//   config.txt                 one agent per line: name, file, role, incentive, model
//   scores_files/<file>.txt    one comma-separated weight row per issue, then a
//                              final line holding the threshold
//   global_instructions.txt    optional setting text
//   initial_deal.txt           optional deal string, e.g. "A1, B2, C3, D1, E4"
// Roles "p1" and "p2" mark the veto parties; p1 is listed first regardless of
// line order.
inline GameLoadResult convert_legacy_game(const std::filesystem::path& dir, LegacyConvertOptions options = {}) {
  std::vector<Diagnostic> diagnostics;
  std::string config_text;
  try {
    config_text = read_text_file(dir / "config.txt");
  } catch (const std::exception& e) {
    return {std::nullopt, {{"config.txt", e.what()}}};
  }

  struct Row {
    Party party;
    std::string file;
    std::string role;
  };
  std::vector<Row> rows;
  const auto lines = detail::non_empty_lines(config_text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    auto cells = detail::split(lines[n], ',');
    if (cells.size() < 3) {
      diagnostics.push_back({"config.txt:" + std::to_string(n + 1), "expected 'name, file, role, ...'"});
      continue;
    }
    Row row;
    row.party.name = cells[0];
    row.file = cells[1];
    row.role = cells[2];
    row.party.id = (row.role == "p1" || row.role == "p2") ? row.role : cells[1];
    row.party.veto = row.role == "p1" || row.role == "p2";
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    auto rank = [](const Row& r) { return r.role == "p1" ? 0 : r.role == "p2" ? 1 : 2; };
    return rank(a) < rank(b);
  });

  GameData g;
  g.id = options.game_id.empty() ? dir.filename().string() : options.game_id;
  g.rounds = options.rounds;
  if (std::filesystem::exists(dir / "global_instructions.txt")) {
    g.setting_text = detail::trim(read_text_file(dir / "global_instructions.txt"));
  }

  std::size_t issue_count = 0;
  std::vector<std::size_t> option_counts;
  for (auto& row : rows) {
    const auto path = dir / "scores_files" / (row.file + ".txt");
    std::string text;
    try {
      text = read_text_file(path);
    } catch (const std::exception& e) {
      diagnostics.push_back({"scores_files/" + row.file + ".txt", e.what()});
      continue;
    }
    auto score_lines = detail::non_empty_lines(text);
    if (score_lines.size() < 2) {
      diagnostics.push_back({"scores_files/" + row.file + ".txt", "expected weight rows followed by a threshold"});
      continue;
    }
    ScoreTable table;
    for (std::size_t i = 0; i + 1 < score_lines.size(); ++i) {
      std::vector<int> weights;
      for (const auto& cell : detail::split(score_lines[i], ',')) {
        try {
          weights.push_back(std::stoi(cell));
        } catch (const std::exception&) {
          diagnostics.push_back({"scores_files/" + row.file + ".txt:" + std::to_string(i + 1),
                                 "non-integer weight '" + cell + "'"});
        }
      }
      table.push_back(std::move(weights));
    }
    try {
      row.party.threshold = std::stoi(score_lines.back());
    } catch (const std::exception&) {
      diagnostics.push_back({"scores_files/" + row.file + ".txt", "last line must be the threshold"});
    }
    if (issue_count == 0) {
      issue_count = table.size();
      for (const auto& r : table) option_counts.push_back(r.size());
    }
    g.parties.push_back(row.party);
    g.weights.push_back(std::move(table));
  }
  if (!diagnostics.empty()) return {std::nullopt, std::move(diagnostics)};

  for (std::size_t i = 0; i < issue_count; ++i) {
    Issue issue;
    issue.id = std::string(1, static_cast<char>('A' + i));
    issue.name = "Issue " + issue.id;
    for (std::size_t o = 0; o < option_counts[i]; ++o) issue.options.push_back(issue.id + std::to_string(o + 1));
    g.issues.push_back(std::move(issue));
  }

  if (options.initial_deal) {
    g.initial_deal = *options.initial_deal;
  } else if (std::filesystem::exists(dir / "initial_deal.txt")) {
    auto deal = parse_deal(read_text_file(dir / "initial_deal.txt"), g.issues);
    if (!deal) return {std::nullopt, {{"initial_deal.txt", "not a complete deal"}}};
    g.initial_deal = *deal;
  } else {
    g.initial_deal = Deal(std::vector<int>(issue_count, 0));
  }

  auto result = validate_game_data(g);
  if (!result.empty()) return {std::nullopt, std::move(result)};
  return {Game(std::move(g)), {}};
}

}  // namespace scoreable
