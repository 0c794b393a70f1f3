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

// Local chat-completions stand-in and a deterministic fake model used to
// record and replay canned responses.

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "scoreable/scoreable.hpp"

namespace scoreable::testing {

inline std::string completion_body(const std::string& text) {
  return nlohmann::json{{"id", "mock"},
                        {"object", "chat.completion"},
                        {"choices", {{{"index", 0},
                                      {"message", {{"role", "assistant"}, {"content", text}}},
                                      {"finish_reason", "stop"}}}}}
      .dump();
}

inline std::string request_prompt(const httplib::Request& req) {
  const auto doc = nlohmann::json::parse(req.body, nullptr, false);
  if (doc.is_discarded()) return {};
  return doc.at("messages").at(0).at("content").get<std::string>();
}

// FNV-1a, 64 bit.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* kDigits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
  return out;
}

class MockChatServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  explicit MockChatServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post(".*", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits_;
      handler_(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockChatServer() {
    server_.stop();
    thread_.join();
  }
  MockChatServer(const MockChatServer&) = delete;
  MockChatServer& operator=(const MockChatServer&) = delete;

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  std::size_t hits() const { return hits_.load(); }

 private:
  Handler handler_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<std::size_t> hits_{0};
};

// A fake model whose reply is a pure function of the prompt: mostly a full
// deal, sometimes prose, a leaked plan tag or a missing answer.
inline std::string fake_model_reply(const std::string& prompt, const Game& game) {
  Rng rng(fnv1a(prompt));
  const std::uint64_t roll = rng.below(100);
  std::vector<int> d;
  for (const auto& issue : game.issues()) d.push_back(static_cast<int>(rng.below(issue.options.size())));
  const std::string deal = serialize_deal(Deal(d), game);
  if (roll < 2) return "<SCRATCHPAD>I am not sure what to say.</SCRATCHPAD>";
  if (roll < 10) return "<SCRATCHPAD>thinking</SCRATCHPAD>\n<ANSWER>Let us keep talking before we commit.</ANSWER>";
  if (roll < 18) {
    return "<SCRATCHPAD>thinking</SCRATCHPAD>\n<ANSWER>I propose " + deal + " <PLAN>push on issue A</PLAN></ANSWER>";
  }
  return "<SCRATCHPAD>thinking</SCRATCHPAD>\n<ANSWER>I propose " + deal + ".</ANSWER>\n<PLAN>try a nearby deal</PLAN>";
}

// Prompt-hash keyed store of replies, serialised as {"<hash>": "<reply>"}.
class ReplayStore {
 public:
  void put(const std::string& prompt, const std::string& reply) {
    std::lock_guard lock(mu_);
    replies_[hex64(fnv1a(prompt))] = reply;
  }
  std::optional<std::string> get(const std::string& prompt) const {
    std::lock_guard lock(mu_);
    auto it = replies_.find(hex64(fnv1a(prompt)));
    if (it == replies_.end()) return std::nullopt;
    return it->second;
  }
  nlohmann::json to_json() const {
    std::lock_guard lock(mu_);
    return replies_;
  }
  void load(const nlohmann::json& doc) {
    std::lock_guard lock(mu_);
    replies_ = doc.get<std::map<std::string, std::string>>();
  }
  std::size_t size() const {
    std::lock_guard lock(mu_);
    return replies_.size();
  }

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::string> replies_;
};

}  // namespace scoreable::testing
