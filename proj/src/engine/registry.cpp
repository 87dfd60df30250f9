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

#include "exchat/registry.hpp"

#include <algorithm>

namespace exchat {

FunctionRegistry::FunctionRegistry() : selector_(default_action_selector) {}

FunctionRegistry FunctionRegistry::with_builtins() {
  FunctionRegistry r;
  r.add_string("next_subnetwork",
               [](Args, const DialogueState& s) -> std::optional<std::string> {
                 if (s.pending_subnetworks.empty()) return std::nullopt;
                 return s.pending_subnetworks.front();
               });
  r.add_bool("has_next_subnetwork", [](Args, const DialogueState& s) {
    return !s.pending_subnetworks.empty();
  });
  r.add_bool("equals", [](Args args, const DialogueState&) {
    return args.size() == 2 && args[0] == args[1];
  });
  return r;
}

void FunctionRegistry::add_bool(std::string name, BoolFn fn) {
  if (bool_fns_.count(name) || string_fns_.count(name)) {
    throw std::invalid_argument("function already registered: " + name);
  }
  bool_fns_.emplace(std::move(name), std::move(fn));
}

void FunctionRegistry::add_string(std::string name, StringFn fn) {
  if (bool_fns_.count(name) || string_fns_.count(name)) {
    throw std::invalid_argument("function already registered: " + name);
  }
  string_fns_.emplace(std::move(name), std::move(fn));
}

const FunctionRegistry::BoolFn* FunctionRegistry::find_bool(
    std::string_view name) const {
  auto it = bool_fns_.find(name);
  return it == bool_fns_.end() ? nullptr : &it->second;
}

const FunctionRegistry::StringFn* FunctionRegistry::find_string(
    std::string_view name) const {
  auto it = string_fns_.find(name);
  return it == string_fns_.end() ? nullptr : &it->second;
}

std::size_t FunctionRegistry::select(std::span<const Candidate> candidates,
                                     const SelectionContext& ctx) const {
  if (candidates.empty()) throw std::logic_error("no candidates to select from");
  std::size_t i = selector_ ? selector_(candidates, ctx)
                            : default_action_selector(candidates, ctx);
  if (i >= candidates.size()) i = default_action_selector(candidates, ctx);
  return i;
}

void FunctionRegistry::run_post_understanding(DialogueState& state,
                                              const SemanticFrame& frame) const {
  for (const auto& hook : post_understanding_) hook(state, frame, nullptr);
}

void FunctionRegistry::run_post_selection(DialogueState& state,
                                          const SemanticFrame& frame,
                                          const RealizedAction* action) const {
  for (const auto& hook : post_selection_) hook(state, frame, action);
}

int default_kind_rank(KnowledgeKind kind) {
  switch (kind) {
    case KnowledgeKind::kResponsePair: return 0;
    case KnowledgeKind::kExampleResponse: return 1;
    case KnowledgeKind::kRelatedResponse: return 2;
    case KnowledgeKind::kDefaultResponse: return 3;
    case KnowledgeKind::kNonResponse: return 4;
    default: return 5;
  }
}

std::size_t default_action_selector(std::span<const Candidate> candidates,
                                    const SelectionContext&) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    const auto& b = candidates[best];
    const int rc = default_kind_rank(c.kind);
    const int rb = default_kind_rank(b.kind);
    if (rc < rb || (rc == rb && c.order < b.order)) best = i;
  }
  return best;
}

}  // namespace exchat
