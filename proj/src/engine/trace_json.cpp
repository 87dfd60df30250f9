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

#include "exchat/trace_json.hpp"

namespace exchat {

using nlohmann::json;

json frame_to_json(const SemanticFrame& frame) {
  json slots = json::array();
  for (const auto& s : frame.slots) {
    slots.push_back({{"class", s.slot_class},
                     {"surface", s.surface},
                     {"canonical", s.canonical},
                     {"index", s.order_index}});
  }
  return {{"text", frame.text},
          {"supertype", frame.supertype},
          {"supertype_score", frame.supertype_score},
          {"type", frame.type},
          {"type_score", frame.type_score},
          {"slots", std::move(slots)}};
}

json source_to_json(const ActionSource& source) {
  json j{{"expert", source.expert},
         {"kind", std::string(to_string(source.kind))},
         {"label", source.label}};
  if (!source.network.empty()) {
    j["network"] = source.network;
    j["state"] = source.state;
  }
  return j;
}

json trace_to_json(const ExpertTrace& trace) {
  json chain = json::array();
  for (const auto& s : trace.activation_chain) chain.push_back(source_to_json(s));
  return {{"frame", frame_to_json(trace.frame)},
          {"scores", {{"network", trace.network_score},
                      {"response", trace.response_score}}},
          {"branch", trace.branch},
          {"selected_expert", trace.selected_expert},
          {"expert", trace.expert},
          {"kind", std::string(to_string(trace.kind))},
          {"label", trace.label},
          {"fallback", trace.fallback},
          {"activation_chain", std::move(chain)},
          {"warnings", trace.warnings},
          {"elapsed_ms", trace.elapsed_ms}};
}

json turn_to_json(const Turn& turn) {
  return {{"user", turn.user_text},
          {"utterances", turn.utterances},
          {"trace", trace_to_json(turn.trace)}};
}

json system_turn_to_json(const SystemTurn& turn) {
  return {{"utterances", turn.utterances()},
          {"groups", turn.groups},
          {"trace", trace_to_json(turn.trace)}};
}

json turn_log_record(std::string_view session_id, const Turn& turn) {
  return {{"session", session_id},
          {"user", turn.user_text},
          {"frame", frame_to_json(turn.trace.frame)},
          {"branch", turn.trace.branch},
          {"expert", turn.trace.expert},
          {"kind", std::string(to_string(turn.trace.kind))},
          {"label", turn.trace.label},
          {"utterances", turn.utterances},
          {"elapsed_ms", turn.trace.elapsed_ms}};
}

}  // namespace exchat
