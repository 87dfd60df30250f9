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

#include "json.hpp"

#include "exchat/engine.hpp"
#include "exchat/nlu.hpp"
#include "exchat/state.hpp"

namespace exchat {

nlohmann::json frame_to_json(const SemanticFrame& frame);
nlohmann::json source_to_json(const ActionSource& source);
nlohmann::json trace_to_json(const ExpertTrace& trace);
nlohmann::json turn_to_json(const Turn& turn);
nlohmann::json system_turn_to_json(const SystemTurn& turn);

// One line of the turn log.
nlohmann::json turn_log_record(std::string_view session_id, const Turn& turn);

}  // namespace exchat
