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

#include <gtest/gtest.h>

#include <cstdlib>

#include "support/mock_server.hpp"
#include "support/testing.hpp"

namespace scoreable {
namespace {

using testing::MockChatServer;

EndpointConfig config_for(const MockChatServer& server) {
  EndpointConfig cfg;
  cfg.base_url = server.base_url();
  cfg.model = "mock-model";
  cfg.api_key_env = "SCOREABLE_TEST_KEY";
  cfg.timeout = std::chrono::milliseconds(5000);
  return cfg;
}

TEST(ChatClientTest, EchoesPromptAndSendsRequestFields) {
  nlohmann::json seen;
  std::string auth, path;
  MockChatServer server([&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    path = req.path;
    res.set_content(testing::completion_body("echo: " + testing::request_prompt(req)), "application/json");
  });
  ::setenv("SCOREABLE_TEST_KEY", "test-key", 1);
  ChatClient client(config_for(server));
  SamplingParams sampling;
  sampling.temperature = 0.5;
  sampling.max_tokens = 64;
  const ChatResult r = client.complete("hello", sampling);
  ::unsetenv("SCOREABLE_TEST_KEY");
  EXPECT_EQ(r.text, "echo: hello");
  EXPECT_EQ(r.retries, 0);
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(path, "/v1/chat/completions");
  EXPECT_EQ(auth, "Bearer test-key");
  EXPECT_EQ(seen["model"], "mock-model");
  EXPECT_EQ(seen["temperature"], 0.5);
  EXPECT_EQ(seen["max_tokens"], 64);
  EXPECT_FALSE(seen.contains("top_p"));
  EXPECT_EQ(client.network_calls(), 1u);
}

TEST(ChatClientTest, NoAuthorizationHeaderWithoutKey) {
  bool has_auth = true;
  MockChatServer server([&](const httplib::Request& req, httplib::Response& res) {
    has_auth = req.has_header("Authorization");
    res.set_content(testing::completion_body("ok"), "application/json");
  });
  ::unsetenv("SCOREABLE_TEST_KEY");
  ChatClient client(config_for(server));
  EXPECT_EQ(client.complete("x").text, "ok");
  EXPECT_FALSE(has_auth);
}

TEST(ChatClientTest, RetriesOnRateLimitThenSucceeds) {
  std::atomic<int> calls{0};
  MockChatServer server([&](const httplib::Request&, httplib::Response& res) {
    if (++calls <= 2) {
      res.status = 429;
      res.set_header("Retry-After", "7");
      res.set_content("slow down", "text/plain");
      return;
    }
    res.set_content(testing::completion_body("finally"), "application/json");
  });
  std::vector<std::chrono::milliseconds> sleeps;
  ChatClient client(config_for(server), {}, [&](std::chrono::milliseconds d) { sleeps.push_back(d); });
  const ChatResult r = client.complete("x");
  EXPECT_EQ(r.text, "finally");
  EXPECT_EQ(r.retries, 2);
  EXPECT_EQ(calls.load(), 3);
  ASSERT_EQ(sleeps.size(), 2u);
  // Retry-After (7 s) dominates the 1 s and 2 s backoff.
  EXPECT_EQ(sleeps[0], std::chrono::milliseconds(7000));
  EXPECT_EQ(sleeps[1], std::chrono::milliseconds(7000));
}

TEST(ChatClientTest, ExponentialBackoffIsCapped) {
  MockChatServer server([&](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  EndpointConfig cfg = config_for(server);
  cfg.max_retries = 4;
  cfg.initial_backoff = std::chrono::milliseconds(100);
  cfg.max_backoff = std::chrono::milliseconds(300);
  std::vector<long long> sleeps;
  ChatClient client(cfg, {}, [&](std::chrono::milliseconds d) { sleeps.push_back(d.count()); });
  try {
    client.complete("x");
    FAIL() << "expected TransportError";
  } catch (const TransportError& e) {
    EXPECT_EQ(e.attempts(), 5);
    EXPECT_EQ(e.status(), 503);
  }
  EXPECT_EQ(sleeps, (std::vector<long long>{100, 200, 300, 300}));
  EXPECT_EQ(server.hits(), 5u);
}

TEST(ChatClientTest, ClientErrorIsNotRetried) {
  MockChatServer server([&](const httplib::Request&, httplib::Response& res) {
    res.status = 400;
    res.set_content("bad request", "text/plain");
  });
  ChatClient client(config_for(server), {}, [](auto) {});
  try {
    client.complete("x");
    FAIL() << "expected TransportError";
  } catch (const TransportError& e) {
    EXPECT_EQ(e.status(), 400);
    EXPECT_EQ(e.attempts(), 1);
    EXPECT_NE(std::string(e.what()).find("bad request"), std::string::npos);
  }
  EXPECT_EQ(server.hits(), 1u);
}

TEST(ChatClientTest, MalformedBodyRaises) {
  MockChatServer server([&](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"choices\": []}", "application/json");
  });
  ChatClient client(config_for(server), {}, [](auto) {});
  EXPECT_THROW(client.complete("x"), TransportError);
}

TEST(ChatClientTest, UnreachableEndpointRaisesAfterRetries) {
  EndpointConfig cfg;
  cfg.base_url = "http://127.0.0.1:1/v1";
  cfg.max_retries = 1;
  cfg.timeout = std::chrono::milliseconds(1000);
  int sleeps = 0;
  ChatClient client(cfg, {}, [&](auto) { ++sleeps; });
  EXPECT_THROW(client.complete("x"), TransportError);
  EXPECT_EQ(sleeps, 1);
}

TEST(ChatClientTest, DryRunNeverTouchesNetwork) {
  EndpointConfig cfg;
  cfg.base_url = "http://127.0.0.1:1/v1";
  cfg.dry_run = true;
  std::vector<std::string> logged;
  ChatClient client(cfg, "canned", {}, [&](const std::string&, const std::string& p) { logged.push_back(p); });
  EXPECT_EQ(client.complete("prompt one").text, "canned");
  EXPECT_EQ(client.complete("prompt two").text, "canned");
  EXPECT_EQ(client.network_calls(), 0u);
  EXPECT_EQ(logged, (std::vector<std::string>{"prompt one", "prompt two"}));
}

TEST(ChatClientTest, SplitUrl) {
  using P = std::pair<std::string, std::string>;
  EXPECT_EQ(ChatClient::split_url("http://host:8080/v1"), P("http://host:8080", "/v1"));
  EXPECT_EQ(ChatClient::split_url("https://api.example.com/v1/"), P("https://api.example.com", "/v1"));
  EXPECT_EQ(ChatClient::split_url("http://localhost:9"), P("http://localhost:9", ""));
}

TEST(ChatClientTest, ChatAgentUsesClient) {
  MockChatServer server([&](const httplib::Request& req, httplib::Response& res) {
    res.set_content(testing::completion_body("<ANSWER>" + std::to_string(testing::request_prompt(req).size()) +
                                             "</ANSWER>"),
                    "application/json");
  });
  auto client = std::make_shared<ChatClient>(config_for(server));
  ChatAgent agent(client);
  const Game g = testing::toy_game();
  Rng rng(1);
  const std::string prompt = "twelve chars";
  EXPECT_EQ(agent.respond({make_party_view(g, 0), {}, 1, false, prompt, rng}), "<ANSWER>12</ANSWER>");
}

}  // namespace
}  // namespace scoreable
