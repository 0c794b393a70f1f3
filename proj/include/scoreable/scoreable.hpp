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

// Umbrella header.

#pragma once

#include "scoreable/agent.hpp"
#include "scoreable/agents.hpp"
#include "scoreable/chat_client.hpp"
#include "scoreable/deal_space.hpp"
#include "scoreable/game.hpp"
#include "scoreable/game_io.hpp"
#include "scoreable/harness.hpp"
#include "scoreable/metrics.hpp"
#include "scoreable/parsing.hpp"
#include "scoreable/prompt.hpp"
#include "scoreable/protocol.hpp"
#include "scoreable/rng.hpp"
#include "scoreable/welfare.hpp"
