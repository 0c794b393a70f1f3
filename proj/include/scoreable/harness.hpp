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

// Batch orchestration: agent assignment, a bounded worker pool over session
// seeds, per-session artifacts, run manifests and the ablation grid.
//
// Run directory layout:
//   manifest.json              everything needed to re-execute the batch
//   transcripts/session_NNNN.json
//   welfare/session_NNNN.csv
//   prompts/session_NNNN.txt   only with log_prompts or dry_run
//   metrics.json, metrics.csv

#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "scoreable/agents.hpp"
#include "scoreable/chat_client.hpp"
#include "scoreable/deal_space.hpp"
#include "scoreable/game_io.hpp"
#include "scoreable/metrics.hpp"
#include "scoreable/prompt.hpp"
#include "scoreable/protocol.hpp"

namespace scoreable {

inline constexpr const char* kToolVersion = "0.1.0";

// How one party is played.
//   baseline               random-sequence rule-based agent
//   baseline-priority      priority-ordered rule-based agent
//   scripted:<file>        replay texts from a JSON script file
//   anything else          chat model name on the configured endpoint
struct AgentSpec {
  enum class Kind { kBaseline, kBaselinePriority, kScripted, kChat };
  Kind kind = Kind::kBaseline;
  std::string model;   // chat model name
  json script;         // scripted: {"turns": {"<turn>": "<text>"}, "fallback": "<text>"}

  static AgentSpec parse(const std::string& value) {
    AgentSpec a;
    if (value == "baseline") return a;
    if (value == "baseline-priority") {
      a.kind = Kind::kBaselinePriority;
      return a;
    }
    if (value.rfind("scripted:", 0) == 0) {
      a.kind = Kind::kScripted;
      a.model = value.substr(9);
      return a;
    }
    if (value.empty()) throw ValidationError("empty model name");
    a.kind = Kind::kChat;
    a.model = value;
    return a;
  }
};

inline std::string to_string(const AgentSpec& a) {
  switch (a.kind) {
    case AgentSpec::Kind::kBaseline: return "baseline";
    case AgentSpec::Kind::kBaselinePriority: return "baseline-priority";
    case AgentSpec::Kind::kScripted: return "scripted";
    case AgentSpec::Kind::kChat: return a.model;
  }
  return "?";
}

struct ExperimentSpec {
  std::filesystem::path game_path;
  std::optional<json> game_doc;  // overrides game_path (manifest re-execution)
  // Assignments applied in order, later ones win. Forms: "<value>" for every
  // party, "<party-id>=<value>", "@<group>=<value>" for a party group.
  std::vector<std::string> models = {"baseline"};
  std::vector<std::string> incentives;
  AblationConfig ablation;
  int n_sessions = 20;
  std::uint64_t base_seed = 0;
  std::filesystem::path out_dir;
  int workers = 1;
  bool dry_run = false;
  bool restrict_leakage = false;  // strict salvage
  bool log_prompts = false;
  std::optional<std::size_t> history_window;
  std::filesystem::path templates_dir;
  EndpointConfig endpoint;
  SamplingParams sampling;
  std::chrono::milliseconds session_timeout{0};
  // Script files already loaded, keyed by the path given in "scripted:<path>".
  std::map<std::string, json> scripts;
};

namespace detail {

// Applies "<value>", "<party>=<value>", "@<group>=<value>" assignments.
inline std::map<std::string, std::string> resolve_assignments(const Game& game, const std::vector<std::string>& items,
                                                              const std::string& what) {
  std::map<std::string, std::string> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      for (const auto& p : game.parties()) out[p.id] = item;
      continue;
    }
    const std::string lhs = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (!lhs.empty() && lhs[0] == '@') {
      const auto& groups = game.data().party_groups;
      auto it = groups.find(lhs.substr(1));
      if (it == groups.end()) throw ValidationError(what + ": unknown party group '" + lhs.substr(1) + "'");
      for (const auto& id : it->second) out[id] = value;
    } else {
      game.party_index(lhs);
      out[lhs] = value;
    }
  }
  return out;
}

inline std::string session_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "session_%04d", index);
  return buf;
}

struct PromptRecord {
  std::size_t turn;
  std::string party;
  std::string prompt;
};

// Records the prompt of every turn before delegating.
class PromptLoggingAgent : public Agent {
 public:
  PromptLoggingAgent(std::shared_ptr<Agent> inner, std::vector<PromptRecord>* sink)
      : inner_(std::move(inner)), sink_(sink) {}

  std::string respond(const TurnContext& ctx) override {
    sink_->push_back({ctx.turn, ctx.view.party.id, ctx.prompt});
    return inner_->respond(ctx);
  }

 private:
  std::shared_ptr<Agent> inner_;
  std::vector<PromptRecord>* sink_;
};

}  // namespace detail

inline Game load_experiment_game(const ExperimentSpec& spec) {
  if (spec.game_doc) {
    auto r = game_from_json(*spec.game_doc);
    if (!r.ok()) throw ValidationError(r.diagnostics);
    return std::move(*r.game);
  }
  return load_game(spec.game_path);
}

inline std::map<std::string, AgentSpec> resolve_agents(const ExperimentSpec& spec, const Game& game) {
  std::map<std::string, AgentSpec> out;
  for (const auto& [party, value] : detail::resolve_assignments(game, spec.models, "--model")) {
    AgentSpec a = AgentSpec::parse(value);
    if (a.kind == AgentSpec::Kind::kScripted) {
      auto it = spec.scripts.find(a.model);
      json file = it != spec.scripts.end() ? it->second : json::parse(read_text_file(a.model));
      a.script = file.contains(party) ? file[party] : json::object();
    }
    out[party] = std::move(a);
  }
  for (const auto& p : game.parties()) {
    if (!out.count(p.id)) throw ValidationError("no agent assigned to party '" + p.id + "'");
  }
  return out;
}

inline std::map<std::string, Incentive> resolve_incentives(const ExperimentSpec& spec, const Game& game) {
  std::map<std::string, Incentive> out;
  for (const auto& [party, value] : detail::resolve_assignments(game, spec.incentives, "--incentive")) {
    Incentive inc = parse_incentive(value);
    check_incentive(inc, game, party);
    out[party] = inc;
  }
  return out;
}

inline void validate_spec(const ExperimentSpec& spec) {
  if (spec.n_sessions < 1) throw ValidationError("n_sessions must be at least 1");
  if (spec.workers < 1) throw ValidationError("workers must be at least 1");
}

inline std::shared_ptr<Agent> make_agent(const AgentSpec& a, const std::shared_ptr<ChatClient>& client,
                                         const SamplingParams& sampling) {
  switch (a.kind) {
    case AgentSpec::Kind::kBaseline: return std::make_shared<BaselineAgent>(BaselineAgent::Ordering::kRandom);
    case AgentSpec::Kind::kBaselinePriority:
      return std::make_shared<BaselineAgent>(BaselineAgent::Ordering::kPriority);
    case AgentSpec::Kind::kScripted: {
      std::map<std::size_t, std::string> turns;
      if (a.script.contains("turns")) {
        for (const auto& [k, v] : a.script["turns"].items()) turns[std::stoul(k)] = v.get<std::string>();
      }
      return std::make_shared<ScriptedAgent>(std::move(turns), a.script.value("fallback", ""));
    }
    case AgentSpec::Kind::kChat: return std::make_shared<ChatAgent>(client, sampling);
  }
  return nullptr;
}

inline json manifest_json(const ExperimentSpec& spec, const Game& game, const std::map<std::string, AgentSpec>& agents,
                          const std::map<std::string, Incentive>& incentives) {
  json m;
  m["schema"] = "scoreable.manifest.v1";
  m["tool_version"] = kToolVersion;
  m["game"] = game_to_json(game);
  m["models"] = spec.models;
  m["incentive_assignments"] = spec.incentives;
  json resolved = json::object();
  for (const auto& p : game.parties()) {
    const auto& a = agents.at(p.id);
    auto it = incentives.find(p.id);
    resolved[p.id] = {{"agent", to_string(a)},
                      {"incentive", it == incentives.end() ? std::string("cooperative") : to_string(it->second)}};
    if (a.kind == AgentSpec::Kind::kScripted) resolved[p.id]["script"] = a.script;
  }
  m["parties"] = resolved;
  m["scripts"] = json::object();
  for (const auto& [path, doc] : spec.scripts) m["scripts"][path] = doc;
  for (const auto& [party, a] : agents) {
    if (a.kind == AgentSpec::Kind::kScripted && !m["scripts"].contains(a.model)) {
      m["scripts"][a.model] = json::parse(read_text_file(a.model));
    }
  }
  m["ablation"] = to_string(spec.ablation);
  m["n_sessions"] = spec.n_sessions;
  m["base_seed"] = spec.base_seed;
  m["seeds"] = json::array();
  for (int i = 0; i < spec.n_sessions; ++i) m["seeds"].push_back(spec.base_seed + static_cast<std::uint64_t>(i));
  m["salvage"] = spec.restrict_leakage ? "strict" : "lenient";
  m["history_window"] = spec.history_window ? json(*spec.history_window) : json(nullptr);
  m["dry_run"] = spec.dry_run;
  m["log_prompts"] = spec.log_prompts;
  m["endpoint"] = {{"base_url", spec.endpoint.base_url},
                   {"path", spec.endpoint.path},
                   {"api_key_env", spec.endpoint.api_key_env},
                   {"max_retries", spec.endpoint.max_retries},
                   {"timeout_ms", spec.endpoint.timeout.count()},
                   {"max_concurrency", spec.endpoint.max_concurrency}};
  m["sampling"] = {{"temperature", spec.sampling.temperature},
                   {"top_p", spec.sampling.top_p ? json(*spec.sampling.top_p) : json(nullptr)},
                   {"max_tokens", spec.sampling.max_tokens ? json(*spec.sampling.max_tokens) : json(nullptr)}};
  m["session_timeout_ms"] = spec.session_timeout.count();
  return m;
}

// Inverse of manifest_json. Paths (templates, output) come from the caller.
inline ExperimentSpec spec_from_manifest(const json& m) {
  if (m.value("schema", "") != "scoreable.manifest.v1") throw ValidationError("not a scoreable run manifest");
  ExperimentSpec spec;
  spec.game_doc = m.at("game");
  spec.models = m.at("models").get<std::vector<std::string>>();
  spec.incentives = m.at("incentive_assignments").get<std::vector<std::string>>();
  spec.ablation = parse_ablation(m.at("ablation").get<std::string>());
  spec.n_sessions = m.at("n_sessions").get<int>();
  spec.base_seed = m.at("base_seed").get<std::uint64_t>();
  spec.restrict_leakage = m.at("salvage").get<std::string>() == "strict";
  if (!m.at("history_window").is_null()) spec.history_window = m.at("history_window").get<std::size_t>();
  spec.dry_run = m.at("dry_run").get<bool>();
  spec.log_prompts = m.value("log_prompts", false);
  for (const auto& [path, doc] : m.at("scripts").items()) spec.scripts[path] = doc;
  const auto& e = m.at("endpoint");
  spec.endpoint.base_url = e.at("base_url").get<std::string>();
  spec.endpoint.path = e.at("path").get<std::string>();
  spec.endpoint.api_key_env = e.at("api_key_env").get<std::string>();
  spec.endpoint.max_retries = e.at("max_retries").get<int>();
  spec.endpoint.timeout = std::chrono::milliseconds(e.at("timeout_ms").get<long long>());
  spec.endpoint.max_concurrency = e.at("max_concurrency").get<int>();
  const auto& s = m.at("sampling");
  spec.sampling.temperature = s.at("temperature").get<double>();
  if (!s.at("top_p").is_null()) spec.sampling.top_p = s.at("top_p").get<double>();
  if (!s.at("max_tokens").is_null()) spec.sampling.max_tokens = s.at("max_tokens").get<int>();
  spec.session_timeout = std::chrono::milliseconds(m.value("session_timeout_ms", 0LL));
  return spec;
}

// Attachment point for per-session resource accounting. Intentionally empty.
inline void emission_hook(const Transcript&) {}

struct ExperimentResult {
  AggregateReport report;
  std::vector<Transcript> transcripts;
  std::vector<SessionMetrics> metrics;
  std::size_t network_calls = 0;
};

inline json session_metrics_json(const SessionMetrics& m, std::uint64_t seed) {
  return {{"seed", seed},
          {"termination", to_string(m.termination)},
          {"final_5way", m.final_5way},
          {"final_6way", m.final_6way},
          {"any", m.any},
          {"proposals", m.proposals},
          {"wrong", m.wrong},
          {"messages", m.messages},
          {"leaked_messages", m.leaked_messages}};
}

// Runs the batch. Clients for chat models may be injected (tests); otherwise
// one client per model is built from spec.endpoint.
inline ExperimentResult run_experiment(const ExperimentSpec& spec,
                                       std::map<std::string, std::shared_ptr<ChatClient>> clients = {}) {
  validate_spec(spec);
  const Game game = load_experiment_game(spec);
  const auto agents = resolve_agents(spec, game);
  const auto incentives = resolve_incentives(spec, game);
  const PromptTemplates templates = PromptTemplates::load(spec.templates_dir);

  for (const auto& [party, a] : agents) {
    if (a.kind != AgentSpec::Kind::kChat || clients.count(a.model)) continue;
    EndpointConfig cfg = spec.endpoint;
    cfg.model = a.model;
    cfg.dry_run = spec.dry_run;
    clients[a.model] = std::make_shared<ChatClient>(cfg, templates.dry_run_reply);
  }
  AgentRoster shared;
  for (const auto& [party, a] : agents) {
    shared[party] = make_agent(a, a.kind == AgentSpec::Kind::kChat ? clients.at(a.model) : nullptr, spec.sampling);
  }

  SessionOptions base;
  base.parse.mode = spec.restrict_leakage ? SalvageMode::kStrict : SalvageMode::kLenient;
  base.incentives = incentives;
  base.ablation = spec.ablation;
  base.history_window = spec.history_window;
  base.timeout = spec.session_timeout;
  base.templates = &templates;
  const bool log_prompts = spec.log_prompts || spec.dry_run;
  const bool write = !spec.out_dir.empty();

  const std::size_t n = static_cast<std::size_t>(spec.n_sessions);
  ExperimentResult result;
  result.transcripts.resize(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      SessionOptions options = base;
      options.seed = spec.base_seed + i;
      std::vector<detail::PromptRecord> prompts;
      AgentRoster roster = shared;
      if (log_prompts) {
        for (auto& [party, agent] : roster) agent = std::make_shared<detail::PromptLoggingAgent>(agent, &prompts);
      }
      Transcript tr;
      try {
        tr = run_session(game, roster, options);
      } catch (const std::exception& e) {
        tr.game_id = game.id();
        tr.seed = options.seed;
        tr.rounds = game.rounds();
        tr.termination = Termination::kFailedTransport;
        tr.failed_turn = 0;
        tr.failure_detail = e.what();
      }
      emission_hook(tr);
      if (write) {
        const std::string name = detail::session_name(static_cast<int>(i));
        write_text_file(spec.out_dir / "transcripts" / (name + ".json"), transcript_to_json(tr, game).dump(2) + "\n");
        if (log_prompts) {
          std::string text;
          for (const auto& p : prompts) {
            text += "=== turn " + std::to_string(p.turn) + " party " + p.party + " ===\n" + p.prompt + "\n";
          }
          write_text_file(spec.out_dir / "prompts" / (name + ".txt"), text);
        }
      }
      result.transcripts[i] = std::move(tr);
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(spec.workers), n);
    for (std::size_t w = 0; w < k; ++w) pool.emplace_back(worker);
  }

  // Merge, single-threaded, in session order.
  for (const auto& tr : result.transcripts) result.metrics.push_back(session_metrics(tr, game));
  result.report = aggregate(result.metrics);
  attach_bounds(result.report, game);
  for (const auto& [model, client] : clients) result.network_calls += client->network_calls();

  if (write) {
    write_text_file(spec.out_dir / "manifest.json", manifest_json(spec, game, agents, incentives).dump(2) + "\n");
    const WelfareBounds ub = *result.report.usw_bounds, eb = *result.report.esw_bounds, nb = *result.report.nsw_bounds;
    json sessions = json::array();
    for (std::size_t i = 0; i < n; ++i) {
      sessions.push_back(session_metrics_json(result.metrics[i], spec.base_seed + i));
      WelfareSeries series{result.metrics[i].welfare, ub, eb, nb};
      write_text_file(spec.out_dir / "welfare" / (detail::session_name(static_cast<int>(i)) + ".csv"),
                      welfare_csv(series));
    }
    json doc = {{"aggregate", aggregate_to_json(result.report)}, {"sessions", sessions}};
    write_text_file(spec.out_dir / "metrics.json", doc.dump(2) + "\n");
    write_text_file(spec.out_dir / "metrics.csv",
                    metrics_csv_header() + "\n" + metrics_csv_row(to_string(spec.ablation), result.report) + "\n");
  }
  return result;
}

struct GridRow {
  AblationConfig ablation;
  AggregateReport report;
};

inline std::string ablation_grid_csv(const std::vector<GridRow>& rows) {
  std::string out = "prev_deals,others_prefer,candidates,planning,final_5way,final_6way,any\n";
  for (const auto& r : rows) {
    for (bool b : {r.ablation.prev_deals, r.ablation.others_prefer, r.ablation.candidates, r.ablation.planning}) {
      out += b ? "1," : "0,";
    }
    out += format_optional_percent(r.report.final_5way) + ',' + format_optional_percent(r.report.final_6way) + ',' +
           format_optional_percent(r.report.any) + '\n';
  }
  return out;
}

// One batch per ablation configuration, each in out_dir/ablation_<code>/,
// plus grid.csv in out_dir.
inline std::vector<GridRow> run_ablation_grid(const ExperimentSpec& spec,
                                              const std::map<std::string, std::shared_ptr<ChatClient>>& clients = {}) {
  std::vector<GridRow> rows;
  for (const auto& cfg : all_ablation_configs()) {
    ExperimentSpec s = spec;
    s.ablation = cfg;
    if (!spec.out_dir.empty()) s.out_dir = spec.out_dir / ("ablation_" + to_string(cfg));
    rows.push_back({cfg, run_experiment(s, clients).report});
  }
  if (!spec.out_dir.empty()) write_text_file(spec.out_dir / "grid.csv", ablation_grid_csv(rows));
  return rows;
}

inline const std::vector<std::string>& default_banned_words() {
  static const std::vector<std::string> kWords = {"project", "resources"};
  return kWords;
}

// Game-generation prompt. An empty ban list gives the original-style
// template; otherwise the alternative template with each banned word removed
// (whole words, case-insensitive).
inline std::string emit_generation_prompt(const std::vector<std::string>& banned_words, const PromptTemplates& t) {
  if (banned_words.empty()) return t.generation_original;
  std::string text = t.generation_alternative;
  auto lower = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  for (const auto& word : banned_words) {
    if (word.empty()) continue;
    const std::string w = lower(word);
    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
      const bool start_ok = i == 0 || !is_word(text[i - 1]);
      if (start_ok && lower(text.substr(i, w.size())) == w &&
          (i + w.size() == text.size() || !is_word(text[i + w.size()]))) {
        i += w.size();
        if (!out.empty() && out.back() == ' ' && i < text.size() && text[i] == ' ') ++i;
        continue;
      }
      out += text[i++];
    }
    text = std::move(out);
  }
  return text;
}

}  // namespace scoreable
