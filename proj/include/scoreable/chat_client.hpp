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

// Minimal client for OpenAI-compatible chat-completion endpoints, with retry
// and backoff, Retry-After handling, a per-endpoint concurrency cap, request
// spacing shared by all sessions, and a dry-run mode that never touches the
// network.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "scoreable/agent.hpp"

namespace scoreable {

struct EndpointConfig {
  std::string base_url = "https://api.openai.com/v1";  // scheme://host[:port][/prefix]
  std::string path = "/chat/completions";
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";  // name of the variable, never the key
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double backoff_factor = 2.0;
  std::chrono::milliseconds max_backoff{30000};
  std::chrono::milliseconds timeout{120000};
  std::chrono::milliseconds min_request_interval{0};
  int max_concurrency = 4;
  bool dry_run = false;
};

struct SamplingParams {
  double temperature = 0.0;
  std::optional<double> top_p;
  std::optional<int> max_tokens;
};

struct ChatResult {
  std::string text;
  int retries = 0;
  int status = 0;
};

class ChatClient {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;
  using PromptLog = std::function<void(const std::string& model, const std::string& prompt)>;

  explicit ChatClient(EndpointConfig config, std::string dry_run_reply = {}, Sleeper sleeper = {},
                      PromptLog prompt_log = {})
      : config_(std::move(config)),
        dry_run_reply_(std::move(dry_run_reply)),
        sleeper_(sleeper ? std::move(sleeper) : Sleeper([](auto d) { std::this_thread::sleep_for(d); })),
        prompt_log_(std::move(prompt_log)),
        slots_(std::max(1, config_.max_concurrency)) {}

  const EndpointConfig& config() const { return config_; }
  std::size_t network_calls() const { return network_calls_.load(); }

  ChatResult complete(const std::string& prompt, const SamplingParams& sampling = {}) {
    if (prompt_log_) prompt_log_(config_.model, prompt);
    if (config_.dry_run) return {dry_run_reply_, 0, 0};

    const auto [origin, prefix] = split_url(config_.base_url);
    nlohmann::json body = {{"model", config_.model},
                           {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
                           {"temperature", sampling.temperature}};
    if (sampling.top_p) body["top_p"] = *sampling.top_p;
    if (sampling.max_tokens) body["max_tokens"] = *sampling.max_tokens;
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    std::chrono::milliseconds backoff = config_.initial_backoff;
    std::string last_error;
    int last_status = 0;
    std::optional<std::chrono::milliseconds> retry_after;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      if (attempt > 0) {
        sleeper_(retry_after ? std::max(*retry_after, backoff) : backoff);
        backoff = std::min(config_.max_backoff,
                           std::chrono::milliseconds(static_cast<long long>(backoff.count() * config_.backoff_factor)));
      }
      retry_after.reset();
      pace();
      httplib::Result res;
      {
        Slot slot(slots_);
        ++network_calls_;
        httplib::Client cli(origin);
        cli.set_connection_timeout(config_.timeout);
        cli.set_read_timeout(config_.timeout);
        cli.set_write_timeout(config_.timeout);
        res = cli.Post(prefix + config_.path, headers, payload, "application/json");
      }
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        last_status = 0;
        continue;
      }
      last_status = res->status;
      if (res->status == 200) {
        auto doc = nlohmann::json::parse(res->body, nullptr, false);
        if (doc.is_discarded() || !doc.contains("choices") || doc["choices"].empty()) {
          throw TransportError("malformed completion body", attempt + 1, res->status);
        }
        const auto& message = doc["choices"][0]["message"];
        std::string text = message.contains("content") && message["content"].is_string()
                               ? message["content"].get<std::string>()
                               : std::string();
        return {std::move(text), attempt, res->status};
      }
      last_error = "HTTP " + std::to_string(res->status);
      if (res->status == 429 || res->status >= 500) {
        if (res->has_header("Retry-After")) {
          try {
            retry_after = std::chrono::milliseconds(1000LL * std::stoll(res->get_header_value("Retry-After")));
          } catch (const std::exception&) {
          }
        }
        continue;
      }
      throw TransportError(last_error + ": " + res->body.substr(0, 200), attempt + 1, res->status);
    }
    throw TransportError(last_error + " after " + std::to_string(config_.max_retries + 1) + " attempts",
                         config_.max_retries + 1, last_status);
  }

  // "http://host:8080/v1" -> {"http://host:8080", "/v1"}
  static std::pair<std::string, std::string> split_url(const std::string& url) {
    const auto scheme = url.find("://");
    const auto start = scheme == std::string::npos ? 0 : scheme + 3;
    const auto slash = url.find('/', start);
    if (slash == std::string::npos) return {url, ""};
    std::string prefix = url.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, slash), prefix};
  }

 private:
  class Slot {
   public:
    explicit Slot(std::counting_semaphore<>& s) : s_(s) { s_.acquire(); }
    ~Slot() { s_.release(); }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

   private:
    std::counting_semaphore<>& s_;
  };

  // Spaces request starts by min_request_interval across all callers.
  void pace() {
    if (config_.min_request_interval.count() <= 0) return;
    std::chrono::steady_clock::time_point slot;
    {
      std::lock_guard lock(pace_mu_);
      const auto now = std::chrono::steady_clock::now();
      slot = std::max(now, next_start_);
      next_start_ = slot + config_.min_request_interval;
    }
    std::this_thread::sleep_until(slot);
  }

  EndpointConfig config_;
  std::string dry_run_reply_;
  Sleeper sleeper_;
  PromptLog prompt_log_;
  std::counting_semaphore<> slots_;
  std::atomic<std::size_t> network_calls_{0};
  std::mutex pace_mu_;
  std::chrono::steady_clock::time_point next_start_{};
};

}  // namespace scoreable
