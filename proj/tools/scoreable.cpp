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

// Command-line front end: run, stats, ablation-grid, gen-prompt, validate,
// convert.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scoreable/scoreable.hpp"

#ifndef SCOREABLE_TEMPLATE_DIR
#define SCOREABLE_TEMPLATE_DIR "templates"
#endif

namespace {

using namespace scoreable;

std::string default_templates() {
  if (const char* env = std::getenv("SCOREABLE_TEMPLATES"); env && *env) return env;
  return SCOREABLE_TEMPLATE_DIR;
}

struct RunFlags {
  std::string game;
  std::string manifest;
  std::vector<std::string> models;
  std::vector<std::string> incentives;
  std::string ablation = "1111";
  int sessions = 20;
  std::uint64_t seed = 0;
  bool dry_run = false;
  bool restrict_leakage = false;
  bool log_prompts = false;
  std::string out;
  int workers = 1;
  std::string templates = default_templates();
  std::string base_url;
  std::string api_key_env;
  double temperature = 0.0;
  std::optional<double> top_p;
  std::optional<int> max_tokens;
  std::optional<std::size_t> history_window;
  int max_retries = 3;
  int max_concurrency = 4;
  long long request_interval_ms = 0;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool with_ablation) {
  cmd->add_option("--game", f.game, "Game config (JSON)");
  cmd->add_option("--model", f.models,
                  "Agent assignment: baseline | baseline-priority | scripted:<file> | <chat model>; "
                  "optionally prefixed by <party>= or @<group>=");
  cmd->add_option("--incentive", f.incentives,
                  "Incentive assignment: cooperative | greedy | adversarial | adversarial:<party>; "
                  "optionally prefixed by <party>= or @<group>=");
  if (with_ablation) cmd->add_option("--ablation", f.ablation, "Four 0/1 flags: prev, others, candidates, planning");
  cmd->add_option("--sessions", f.sessions, "Sessions per batch")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "Base seed");
  cmd->add_flag("--dry_run", f.dry_run, "Log prompts, never call a model endpoint");
  cmd->add_flag("--restrict_leakage", f.restrict_leakage, "Strict salvage: only a balanced <ANSWER> block counts");
  cmd->add_flag("--log_prompts", f.log_prompts, "Write every prompt under prompts/");
  cmd->add_option("--out", f.out, "Run directory");
  cmd->add_option("--workers", f.workers, "Parallel sessions")->check(CLI::PositiveNumber);
  cmd->add_option("--templates", f.templates, "Prompt template directory");
  cmd->add_option("--base_url", f.base_url, "Chat endpoint base URL");
  cmd->add_option("--api_key_env", f.api_key_env, "Environment variable holding the API key");
  cmd->add_option("--temperature", f.temperature, "Sampling temperature");
  cmd->add_option("--top_p", f.top_p, "Nucleus sampling mass");
  cmd->add_option("--max_tokens", f.max_tokens, "Completion token limit");
  cmd->add_option("--history_window", f.history_window, "Show only the last k public answers");
  cmd->add_option("--max_retries", f.max_retries, "Retries per request");
  cmd->add_option("--max_concurrency", f.max_concurrency, "Concurrent requests per model");
  cmd->add_option("--request_interval_ms", f.request_interval_ms, "Minimum spacing between requests");
}

ExperimentSpec spec_from_flags(const RunFlags& f) {
  ExperimentSpec spec;
  if (!f.manifest.empty()) {
    spec = spec_from_manifest(json::parse(read_text_file(f.manifest)));
  } else {
    if (f.game.empty()) throw ValidationError("--game is required");
    spec.game_path = f.game;
    if (!f.models.empty()) spec.models = f.models;
    spec.incentives = f.incentives;
    spec.ablation = parse_ablation(f.ablation);
    spec.n_sessions = f.sessions;
    spec.base_seed = f.seed;
    spec.dry_run = f.dry_run;
    spec.restrict_leakage = f.restrict_leakage;
    spec.log_prompts = f.log_prompts;
    spec.history_window = f.history_window;
    if (!f.base_url.empty()) spec.endpoint.base_url = f.base_url;
    if (!f.api_key_env.empty()) spec.endpoint.api_key_env = f.api_key_env;
    spec.endpoint.max_retries = f.max_retries;
    spec.endpoint.max_concurrency = f.max_concurrency;
    spec.endpoint.min_request_interval = std::chrono::milliseconds(f.request_interval_ms);
    spec.sampling.temperature = f.temperature;
    spec.sampling.top_p = f.top_p;
    spec.sampling.max_tokens = f.max_tokens;
  }
  spec.out_dir = f.out;
  spec.workers = f.workers;
  spec.templates_dir = f.templates;
  return spec;
}

void print_report(const AggregateReport& r) {
  std::cout << "sessions:        " << r.n_sessions << " (" << r.n_failed << " failed, " << r.n_failed_transport
            << " transport)\n"
            << "final 5/6-way:   " << format_optional_percent(r.final_5way) << "\n"
            << "final 6-way:     " << format_optional_percent(r.final_6way) << "\n"
            << "any (anchor in): " << format_optional_percent(r.any) << "\n"
            << "wrong:           " << format_optional_percent(r.wrong) << "\n"
            << "leaked messages: " << format_optional_percent(r.leaked) << "\n"
            << "leaked sessions: " << format_optional_percent(r.leaked_sessions) << "\n"
            << "failed:          " << format_percent(r.failed) << "\n";
  if (r.usw_trend) {
    std::cout << "usw trend:       slope " << r.usw_trend->slope << ", variance " << r.usw_trend->variance
              << ", correlation " << r.usw_trend->correlation << "\n";
  }
}

void print_stats(const Game& game) {
  const DealSpaceStats s = compute_stats(game);
  std::cout << "game:            " << game.id() << "\n"
            << "deals:           " << s.total << "\n"
            << "acceptable:      " << s.n_acceptable << "/" << s.total << "\n"
            << "hard acceptable: " << s.n_hard << "/" << s.total << "\n"
            << "sparsity:        " << format_percent(s.sparsity_pct) << "%\n"
            << "iou:             " << format_percent(s.iou_pct) << "%\n";
  for (auto metric : {WelfareMetric::kUtilitarian, WelfareMetric::kEgalitarian, WelfareMetric::kNash}) {
    const auto b = welfare_bounds(game, metric);
    std::cout << to_string(metric) << " range:" << std::string(10 - to_string(metric).size(), ' ') << b.min << " .. "
              << b.max << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scoreable negotiation games: engine and experiment harness"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run a batch of negotiation sessions");
  add_run_flags(run, run_flags, true);
  run->add_option("--manifest", run_flags.manifest, "Re-execute the batch described by a run manifest");

  RunFlags grid_flags;
  auto* grid = app.add_subcommand("ablation-grid", "Run one batch per ablation configuration (16)");
  add_run_flags(grid, grid_flags, false);

  std::string stats_game;
  auto* stats = app.add_subcommand("stats", "Deal-space statistics of a game");
  stats->add_option("game", stats_game, "Game config (JSON)")->required();

  std::vector<std::string> banned;
  bool no_ban = false;
  std::string gen_templates = default_templates();
  auto* gen = app.add_subcommand("gen-prompt", "Print the game-generation prompt");
  gen->add_option("--ban", banned, "Banned words (default: project, resources)");
  gen->add_flag("--no_ban", no_ban, "Use the original template without a ban list");
  gen->add_option("--templates", gen_templates, "Prompt template directory");

  std::vector<std::string> validate_paths;
  auto* validate = app.add_subcommand("validate", "Validate game configs");
  validate->add_option("paths", validate_paths, "Game config files")->required();

  std::string legacy_dir, convert_out, convert_id, convert_initial;
  int convert_rounds = kDefaultRounds;
  auto* convert = app.add_subcommand("convert", "Convert a legacy game directory to a JSON config");
  convert->add_option("dir", legacy_dir, "Legacy game directory")->required();
  convert->add_option("--out", convert_out, "Output JSON path (stdout if omitted)");
  convert->add_option("--id", convert_id, "Game id (default: directory name)");
  convert->add_option("--rounds", convert_rounds, "Rounds");
  convert->add_option("--initial_deal", convert_initial, "Initial deal, e.g. \"A1, B2, C3, D4, E5\"");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const ExperimentResult r = run_experiment(spec_from_flags(run_flags));
      print_report(r.report);
      if (run_flags.dry_run) std::cout << "network calls:   " << r.network_calls << "\n";
    } else if (*grid) {
      const auto rows = run_ablation_grid(spec_from_flags(grid_flags));
      std::cout << ablation_grid_csv(rows);
    } else if (*stats) {
      print_stats(load_game(stats_game));
    } else if (*gen) {
      const auto templates = PromptTemplates::load(gen_templates);
      std::vector<std::string> words = no_ban ? std::vector<std::string>{} : default_banned_words();
      if (!banned.empty()) words = banned;
      std::cout << emit_generation_prompt(words, templates) << "\n";
    } else if (*validate) {
      int status = 0;
      for (const auto& path : validate_paths) {
        const auto result = validate_game_config(path);
        if (result.ok()) {
          std::cout << path << ": ok\n";
          continue;
        }
        status = 1;
        for (const auto& d : result.diagnostics) std::cout << path << ": " << d.to_string() << "\n";
      }
      return status;
    } else if (*convert) {
      LegacyConvertOptions options;
      options.game_id = convert_id;
      options.rounds = convert_rounds;
      auto converted = convert_legacy_game(legacy_dir, options);
      if (!converted.ok()) throw ValidationError(converted.diagnostics);
      const Game& game = *converted.game;
      json doc = game_to_json(game);
      if (!convert_initial.empty()) {
        auto deal = parse_deal(convert_initial, game);
        if (!deal) throw ValidationError("cannot parse --initial_deal '" + convert_initial + "'");
        for (std::size_t i = 0; i < game.num_issues(); ++i) doc["initial_deal"][game.issues()[i].id] = (*deal)[i] + 1;
      }
      const std::string text = doc.dump(2) + "\n";
      if (convert_out.empty()) {
        std::cout << text;
      } else {
        write_text_file(convert_out, text);
      }
    }
  } catch (const ValidationError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << "error: " << d.to_string() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
