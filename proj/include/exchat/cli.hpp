// Copyright 2026 The exchat Authors.
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

#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "exchat/state.hpp"

namespace exchat {

inline constexpr int kExitOk = 0;
inline constexpr int kExitContent = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `exchat` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

struct ReplayScript {
  std::string topic;
  std::vector<std::string> utterances;
};

// First non-blank line `topic: <name>`, then one user utterance per line.
// Throws std::runtime_error naming the offending line.
ReplayScript parse_replay_script(std::string_view text);

// "System: ..." and "User: ..." lines; a system turn with several
// utterances is joined with " | ".
std::string render_transcript(const std::vector<Turn>& history);

// Row label for one system turn, e.g. "response (non-response) -> network".
std::string frequency_row(const Turn& turn);

struct FrequencyTable {
  std::vector<std::pair<std::string, int>> rows;  // fixed order, zeros kept
  int total = 0;
};
FrequencyTable frequency_table(const std::vector<Turn>& history);
std::string render_frequency_table(const FrequencyTable& table);

// Line-based unified diff with three lines of context; empty when equal.
std::string unified_diff(std::string_view a, std::string_view b,
                         std::string_view a_name, std::string_view b_name);

}  // namespace exchat
