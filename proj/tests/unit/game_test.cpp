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

#include "support/testing.hpp"

namespace scoreable {
namespace {

using testing::toy_game;

bool mentions(const std::vector<Diagnostic>& diagnostics, const std::string& needle) {
  for (const auto& d : diagnostics) {
    if (d.to_string().find(needle) != std::string::npos) return true;
  }
  return false;
}

GameData toy_data() { return toy_game().data(); }

TEST(GameTest, UtilityOfBestDealIs100) {
  const Game g = toy_game();
  EXPECT_EQ(utility(g, "p1", Deal({0, 0})), 100);
  EXPECT_EQ(utility(g, "p2", Deal({1, 1})), 100);
  EXPECT_EQ(utility(g, "p3", Deal({0, 2})), 100);
}

TEST(GameTest, UtilityHandComputed) {
  const Game g = toy_game();
  // A2, B3: p1 10 + 20, p2 30 + 70, p3 50 + 50.
  EXPECT_EQ(utilities(g, Deal({1, 2})), (std::vector<int>{30, 100, 100}));
  // A1, B2: p1 60 + 0, p2 0 + 70, p3 50 + 25.
  EXPECT_EQ(utilities(g, Deal({0, 1})), (std::vector<int>{60, 70, 75}));
}

TEST(GameTest, AllZeroWeightsScoreZero) {
  GameData d = toy_data();
  d.weights[2] = {{0, 0}, {0, 0, 0}};
  const Game g = Game::unchecked(d);
  for (const auto& deal : enumerate_deals(g)) EXPECT_EQ(utility(g, 2, deal), 0);
}

TEST(GameTest, UnknownPartyAndMalformedDealThrow) {
  const Game g = toy_game();
  EXPECT_THROW(utility(g, "p9", Deal({0, 0})), ValidationError);
  EXPECT_THROW(utility(g, "p1", Deal({0})), ValidationError);
  EXPECT_THROW(utility(g, "p1", Deal({0, 3})), ValidationError);
  EXPECT_THROW(utility(g, "p1", Deal({-1, 0})), ValidationError);
}

TEST(GameTest, AcceptanceUsesGreaterOrEqual) {
  GameData d = toy_data();
  // A1, B2 gives (60, 70, 75); put every party exactly at threshold.
  d.parties[0].threshold = 60;
  d.parties[1].threshold = 70;
  d.parties[2].threshold = 75;
  const Game g(d);
  EXPECT_TRUE(is_acceptable(g, Deal({0, 1})));
  EXPECT_TRUE(is_hard_acceptable(g, Deal({0, 1})));
}

TEST(GameTest, OneNonVetoBelowIsAcceptableButNotHard) {
  GameData d = toy_data();
  d.parties[2].threshold = 76;
  const Game g(d);
  EXPECT_TRUE(is_acceptable(g, Deal({0, 1})));
  EXPECT_FALSE(is_hard_acceptable(g, Deal({0, 1})));
}

TEST(GameTest, VetoBelowIsNeverAcceptable) {
  GameData d = toy_data();
  d.parties[1].threshold = 71;
  const Game g(d);
  EXPECT_FALSE(is_acceptable(g, Deal({0, 1})));
  d.parties[1].threshold = 70;
  d.parties[0].threshold = 61;
  EXPECT_FALSE(is_acceptable(Game(d), Deal({0, 1})));
}

TEST(GameTest, TwoNonVetoBelowIsNotAcceptable) {
  GameData d = toy_data();
  d.parties.push_back(d.parties[2]);
  d.parties.back().id = "p4";
  d.weights.push_back(d.weights[2]);
  d.parties[2].threshold = 100;
  d.parties[3].threshold = 100;
  EXPECT_FALSE(is_acceptable(Game(d), Deal({0, 1})));
}

TEST(GameTest, ZeroThresholdsAcceptEverything) {
  const Game g = scale_thresholds(toy_game(), -100);
  for (const auto& deal : enumerate_deals(g)) EXPECT_TRUE(is_hard_acceptable(g, deal));
}

TEST(GameTest, ScaleThresholdsClampsAndComposes) {
  const Game g = toy_game();
  EXPECT_EQ(scale_thresholds(g, 0).data().parties[1].threshold, 60);
  const Game up = scale_thresholds(g, 45);
  EXPECT_EQ(up.party(0).threshold, 95);
  EXPECT_EQ(up.party(1).threshold, 100);
  EXPECT_EQ(up.party(2).threshold, 100);
  const Game ab = scale_thresholds(scale_thresholds(g, -5), -7);
  const Game direct = scale_thresholds(g, -12);
  for (std::size_t p = 0; p < g.num_parties(); ++p) EXPECT_EQ(ab.party(p).threshold, direct.party(p).threshold);
}

TEST(GameTest, RestrictPlayers) {
  GameData d = toy_data();
  d.parties.push_back(d.parties[2]);
  d.parties.back().id = "p4";
  d.parties.back().threshold = 100;
  d.weights.push_back(d.weights[2]);
  const Game g(d);
  const Game same = restrict_players(g, {"p1", "p2", "p3", "p4"});
  EXPECT_EQ(same.num_parties(), 4u);
  const Game three = restrict_players(g, {"p1", "p2", "p3"});
  EXPECT_EQ(three.num_parties(), 3u);
  for (const auto& deal : enumerate_deals(g)) {
    if (is_hard_acceptable(g, deal)) EXPECT_TRUE(is_hard_acceptable(three, deal));
  }
  EXPECT_THROW(restrict_players(g, {"p1", "p3", "p4"}), ValidationError);
  EXPECT_THROW(restrict_players(g, {"p1", "p2"}), ValidationError);
  EXPECT_THROW(restrict_players(g, {"p1", "p2", "p3", "zz"}), ValidationError);
}

TEST(GameTest, ValidationDiagnostics) {
  {
    GameData d = toy_data();
    d.weights[1][1] = {10, 65, 65};  // best case 30 + 65 = 95
    try {
      Game g(d);
      FAIL() << "expected a validation error";
    } catch (const ValidationError& e) {
      EXPECT_TRUE(mentions(e.diagnostics(), "p2"));
      EXPECT_TRUE(mentions(e.diagnostics(), "95"));
    }
  }
  {
    GameData d = toy_data();
    d.parties[2].veto = true;
    EXPECT_THROW(Game{d}, ValidationError);
  }
  {
    GameData d = toy_data();
    d.parties[1].veto = false;
    d.parties[2].veto = true;
    EXPECT_THROW(Game{d}, ValidationError);  // p2 must be a veto party
  }
  {
    GameData d = toy_data();
    d.parties[0].threshold = 101;
    EXPECT_THROW(Game{d}, ValidationError);
  }
  {
    GameData d = toy_data();
    d.weights[0][1] = {40, -1, 20};
    EXPECT_THROW(Game{d}, ValidationError);
  }
  {
    GameData d = toy_data();
    d.issues[0].options.pop_back();
    EXPECT_THROW(Game{d}, ValidationError);
  }
  {
    GameData d = toy_data();
    d.initial_deal = Deal({0, 5});
    EXPECT_THROW(Game{d}, ValidationError);
  }
  {
    GameData d = toy_data();
    d.rounds = 0;
    EXPECT_THROW(Game{d}, ValidationError);
  }
  {
    GameData d = toy_data();
    d.parties.pop_back();
    d.weights.pop_back();
    EXPECT_THROW(Game{d}, ValidationError);
  }
}

TEST(GameTest, PropertyMaxUtilityIs100AndLinear) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Game g = testing::random_game(rng);
    for (std::size_t p = 0; p < g.num_parties(); ++p) {
      int best = 0, worst = 1000;
      for (const auto& deal : enumerate_deals(g)) {
        best = std::max(best, utility(g, p, deal));
        worst = std::min(worst, utility(g, p, deal));
      }
      EXPECT_EQ(best, 100);
      EXPECT_GE(worst, 0);
    }
    // Changing one issue changes utility by exactly the weight difference.
    const auto deals = enumerate_deals(g);
    const Deal& d = deals[rng.below(deals.size())];
    const std::size_t issue = rng.below(g.num_issues());
    Deal e = d;
    e.choice[issue] = static_cast<int>(rng.below(g.issues()[issue].size()));
    for (std::size_t p = 0; p < g.num_parties(); ++p) {
      EXPECT_EQ(utility(g, p, e) - utility(g, p, d),
                g.weight(p, issue, static_cast<std::size_t>(e[issue])) -
                    g.weight(p, issue, static_cast<std::size_t>(d[issue])));
    }
  }
}

TEST(GameTest, PropertyScaleComposesWithoutClamping) {
  Rng rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    const Game g = testing::random_game(rng);
    const int a = rng.between(-20, 20), b = rng.between(-20, 20);
    bool clamps = false;
    for (const auto& p : g.parties()) {
      for (int t : {p.threshold + a, p.threshold + a + b}) clamps |= t < 0 || t > 100;
    }
    if (clamps) continue;
    const Game ab = scale_thresholds(scale_thresholds(g, a), b);
    const Game direct = scale_thresholds(g, a + b);
    for (std::size_t p = 0; p < g.num_parties(); ++p) EXPECT_EQ(ab.party(p).threshold, direct.party(p).threshold);
  }
}

}  // namespace
}  // namespace scoreable
