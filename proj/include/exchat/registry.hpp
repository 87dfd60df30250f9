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

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "exchat/state.hpp"

namespace exchat {

struct Candidate {
  RealizedAction action;
  KnowledgeKind kind;
  std::size_t order;  // position in knowledge-base order within its kind
};

struct SelectionContext {
  std::string_view expert;
  const SemanticFrame& frame;
  const DialogueState& state;
};

// Developer-supplied functions referenced from dialogue knowledge, the
// per-expert action selector and the hooks.
class FunctionRegistry {
 public:
  using Args = std::span<const std::string>;
  using BoolFn = std::function<bool(Args, const DialogueState&)>;
  using StringFn =
      std::function<std::optional<std::string>(Args, const DialogueState&)>;
  // Returns an index into the candidate list.
  using ActionSelector =
      std::function<std::size_t(std::span<const Candidate>, const SelectionContext&)>;
  // `action` is null for the post-understanding hook.
  using Hook = std::function<void(DialogueState&, const SemanticFrame&,
                                  const RealizedAction* action)>;

  FunctionRegistry();

  // Registers the built-ins: next_subnetwork(), has_next_subnetwork() and
  // equals(a, b).
  static FunctionRegistry with_builtins();

  // Throws std::invalid_argument when the name is taken by either kind.
  void add_bool(std::string name, BoolFn fn);
  void add_string(std::string name, StringFn fn);

  // Persistent variables that hooks or external code may write; lint treats
  // them as having a writer.
  void declare_variable(std::string name) { provided_.insert(std::move(name)); }

  void set_action_selector(ActionSelector selector) { selector_ = std::move(selector); }
  void add_post_understanding_hook(Hook hook) { post_understanding_.push_back(std::move(hook)); }
  void add_post_selection_hook(Hook hook) { post_selection_.push_back(std::move(hook)); }

  const BoolFn* find_bool(std::string_view name) const;
  const StringFn* find_string(std::string_view name) const;
  bool has_bool(std::string_view name) const { return find_bool(name) != nullptr; }
  bool has_string(std::string_view name) const { return find_string(name) != nullptr; }
  bool provides_variable(std::string_view name) const {
    return provided_.find(name) != provided_.end();
  }

  std::size_t select(std::span<const Candidate> candidates,
                     const SelectionContext& ctx) const;

  void run_post_understanding(DialogueState& state, const SemanticFrame& frame) const;
  void run_post_selection(DialogueState& state, const SemanticFrame& frame,
                          const RealizedAction* action) const;

 private:
  std::map<std::string, BoolFn, std::less<>> bool_fns_;
  std::map<std::string, StringFn, std::less<>> string_fns_;
  std::set<std::string, std::less<>> provided_;
  ActionSelector selector_;
  std::vector<Hook> post_understanding_;
  std::vector<Hook> post_selection_;
};

// Priority rank used by the default selector: response pair, example
// response, related response, default response, non-response. Network and
// other kinds rank after those.
int default_kind_rank(KnowledgeKind kind);

// Highest-priority kind, then knowledge-base order.
std::size_t default_action_selector(std::span<const Candidate> candidates,
                                    const SelectionContext& ctx);

}  // namespace exchat
