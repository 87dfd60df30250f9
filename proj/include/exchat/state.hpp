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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exchat/nlu.hpp"

namespace exchat {

enum class KnowledgeKind {
  kInitial,
  kNetwork,
  kResponsePair,
  kDefaultResponse,
  kExampleResponse,
  kRelatedResponse,
  kNonResponse,
  kFallback,  // configured utterance used when nothing else realizes
};

std::string_view to_string(KnowledgeKind kind);

inline constexpr std::string_view kResponseExpert = "response";
inline constexpr std::string_view kNetworkExpert = "network";

struct ActionSource {
  std::string expert;  // "response" or "network"
  KnowledgeKind kind = KnowledgeKind::kNonResponse;
  std::string label;
  std::string network;  // set for network actions
  std::string state;

  bool operator==(const ActionSource&) const = default;
};

struct RealizedActivation {
  std::string expert_id;
  std::string initial_state;
  std::map<std::string, std::string> args;

  bool operator==(const RealizedActivation&) const = default;
};

struct RealizedAction {
  std::vector<std::string> utterance_texts;
  // nullopt value clears the variable
  std::vector<std::pair<std::string, std::optional<std::string>>> variable_settings;
  std::optional<RealizedActivation> expert_activation;
  ActionSource source;

  bool operator==(const RealizedAction&) const = default;
};

struct ActiveNetwork {
  std::string network;
  std::string state;
  bool just_activated = false;

  bool operator==(const ActiveNetwork&) const = default;
};

struct ExpertTrace {
  SemanticFrame frame;
  double network_score = 0.0;
  double response_score = 0.0;
  int branch = 6;  // 1..6, see select_expert; 0 for the session opening
  std::string selected_expert;  // winner of expert selection
  std::string expert;           // expert that produced the primary action
  KnowledgeKind kind = KnowledgeKind::kNonResponse;
  std::string label;
  bool fallback = false;  // selected network could not act
  std::vector<ActionSource> activation_chain;  // actions in output order
  std::vector<std::string> warnings;
  double elapsed_ms = 0.0;

  bool operator==(const ExpertTrace&) const = default;
};

struct Turn {
  std::string user_text;  // empty for the opening turn
  std::vector<std::string> utterances;
  ExpertTrace trace;

  bool operator==(const Turn&) const = default;
};

struct DialogueState {
  std::map<std::string, std::string> variables;
  std::optional<ActiveNetwork> active_network;
  std::vector<Turn> history;
  std::string session_topic;
  std::string session_network;
  std::vector<std::string> pending_subnetworks;

  std::optional<std::string> variable(std::string_view name) const;

  bool operator==(const DialogueState&) const = default;
};

}  // namespace exchat
