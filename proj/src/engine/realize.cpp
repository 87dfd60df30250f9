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

#include <exception>

#include "exchat/engine.hpp"

namespace exchat {

namespace {

struct Realizer {
  const DialogueState& state;
  const FunctionRegistry& registry;
  std::vector<std::string>* warnings;

  void warn(std::string msg) const {
    if (warnings) warnings->push_back(std::move(msg));
  }

  std::optional<std::vector<std::string>> args(const std::vector<CallArg>& in) const {
    std::vector<std::string> out;
    out.reserve(in.size());
    for (const auto& a : in) {
      if (const auto* v = std::get_if<VarRef>(&a)) {
        auto value = state.variable(v->name);
        if (!value) return std::nullopt;
        out.push_back(std::move(*value));
      } else {
        out.push_back(std::get<Literal>(a).text);
      }
    }
    return out;
  }

  std::optional<bool> test(const FunctionCall& call) const {
    const auto* fn = registry.find_bool(call.name);
    if (!fn) return std::nullopt;
    auto a = args(call.args);
    if (!a) return std::nullopt;
    try {
      return (*fn)(*a, state);
    } catch (const std::exception& e) {
      warn("function " + call.name + " failed: " + e.what());
      return std::nullopt;
    }
  }

  std::optional<std::string> call(const FunctionCall& call) const {
    const auto* fn = registry.find_string(call.name);
    if (!fn) return std::nullopt;
    auto a = args(call.args);
    if (!a) return std::nullopt;
    try {
      return (*fn)(*a, state);
    } catch (const std::exception& e) {
      warn("function " + call.name + " failed: " + e.what());
      return std::nullopt;
    }
  }

  std::optional<std::string> segment(const UtteranceTemplate::Segment& seg) const {
    if (const auto* lit = std::get_if<Literal>(&seg)) return lit->text;
    if (const auto* v = std::get_if<VarRef>(&seg)) return state.variable(v->name);
    return call(std::get<FunctionCall>(seg));
  }

  std::optional<std::string> text(const UtteranceTemplate& t) const {
    std::string out;
    for (const auto& seg : t.segments) {
      auto s = segment(seg);
      if (!s) return std::nullopt;
      out += *s;
    }
    return out;
  }

  std::optional<std::string> expr(const Expr& e) const {
    if (const auto* lit = std::get_if<Literal>(&e)) return lit->text;
    if (const auto* v = std::get_if<VarRef>(&e)) return state.variable(v->name);
    return call(std::get<FunctionCall>(e));
  }
};

}  // namespace

std::optional<RealizedAction> realize(const ActionDescription& desc,
                                      const DialogueState& state,
                                      const FunctionRegistry& registry,
                                      ActionSource source,
                                      std::vector<std::string>* warnings) {
  const Realizer r{state, registry, warnings};
  if (desc.condition) {
    auto ok = r.test(*desc.condition);
    if (!ok || !*ok) return std::nullopt;
  }
  RealizedAction out;
  for (const auto& u : desc.utterances) {
    auto t = r.text(u);
    if (!t) return std::nullopt;
    out.utterance_texts.push_back(std::move(*t));
  }
  for (const auto& vs : desc.variable_settings) {
    if (!vs.value) {
      out.variable_settings.emplace_back(vs.variable, std::nullopt);
      continue;
    }
    auto v = r.expr(*vs.value);
    if (!v) return std::nullopt;
    out.variable_settings.emplace_back(vs.variable, std::move(*v));
  }
  if (desc.expert_activation) {
    auto initial = r.text(desc.expert_activation->initial_state);
    if (!initial) return std::nullopt;
    out.expert_activation = RealizedActivation{
        desc.expert_activation->expert_id, std::move(*initial),
        desc.expert_activation->args};
  }
  if (source.label.empty() && desc.label) source.label = *desc.label;
  out.source = std::move(source);
  return out;
}

void apply_frame_variables(const SemanticFrame& frame, DialogueState& state) {
  for (const auto& s : frame.slots) state.variables[s.variable()] = s.canonical;
}

void clear_slot_variables(const KnowledgeBase& kb, DialogueState& state) {
  std::erase_if(state.variables,
                [&](const auto& kv) { return kb.is_slot_variable(kv.first); });
}

bool condition_holds(const TransitionCondition& cond, const SemanticFrame& frame,
                     const DialogueState& state, const FunctionRegistry& registry) {
  if (const auto* s = std::get_if<SupertypeIs>(&cond)) return frame.supertype == s->name;
  if (const auto* t = std::get_if<TypeIs>(&cond)) return frame.type == t->name;
  const Realizer r{state, registry, nullptr};
  return r.test(std::get<FunctionCall>(cond)).value_or(false);
}

bool transition_matches(const Transition& t, const SemanticFrame& frame,
                        const DialogueState& state, const FunctionRegistry& registry) {
  for (const auto& c : t.conditions) {
    if (!condition_holds(c, frame, state, registry)) return false;
  }
  return true;
}

StepResult network_step(const NetworkState& current, const SemanticFrame& frame,
                        const DialogueState& state, const FunctionRegistry& registry) {
  for (const auto& t : current.transitions) {
    if (transition_matches(t, frame, state, registry)) return Advance{t.destination};
  }
  return NoMatch{};
}

}  // namespace exchat
