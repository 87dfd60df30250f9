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

#include "exchat/state.hpp"

namespace exchat {

std::string_view to_string(KnowledgeKind kind) {
  switch (kind) {
    case KnowledgeKind::kInitial: return "initial";
    case KnowledgeKind::kNetwork: return "network";
    case KnowledgeKind::kResponsePair: return "response-pair";
    case KnowledgeKind::kDefaultResponse: return "default-response";
    case KnowledgeKind::kExampleResponse: return "example-response";
    case KnowledgeKind::kRelatedResponse: return "related-response";
    case KnowledgeKind::kNonResponse: return "non-response";
    case KnowledgeKind::kFallback: return "fallback";
  }
  return "unknown";
}

std::optional<std::string> DialogueState::variable(std::string_view name) const {
  auto it = variables.find(std::string(name));
  if (it == variables.end()) return std::nullopt;
  return it->second;
}

}  // namespace exchat
