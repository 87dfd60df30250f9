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

#include <algorithm>

#include "exchat/engine.hpp"
#include "exchat/text.hpp"

namespace exchat {

std::optional<TfIdfIndex> build_example_index(const KnowledgeBase& kb) {
  const auto& examples = kb.responses.example_responses;
  if (examples.empty()) return std::nullopt;
  std::vector<Document> docs;
  docs.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    Document d{i, {}};
    for (auto& t : tokenize_all(examples[i].example_utterance)) {
      d.terms.push_back(std::move(t.lower));
    }
    docs.push_back(std::move(d));
  }
  return TfIdfIndex::build(docs);
}

std::vector<Candidate> response_candidates(const SemanticFrame& frame,
                                           const EngineContext& ctx,
                                           const DialogueState& state) {
  const auto& rk = ctx.kb.responses;
  std::vector<Candidate> out;
  auto add = [&](const ActionDescription& desc, KnowledgeKind kind,
                 std::size_t order) {
    auto a = realize(desc, state, ctx.registry,
                     ActionSource{std::string(kResponseExpert), kind, {}, {}, {}});
    if (a) out.push_back({std::move(*a), kind, order});
  };

  if (auto it = rk.response_pairs.find(frame.type); it != rk.response_pairs.end()) {
    for (std::size_t i = 0; i < it->second.size(); ++i) {
      add(it->second[i], KnowledgeKind::kResponsePair, i);
    }
  }
  if (auto it = rk.default_responses.find(frame.supertype);
      it != rk.default_responses.end()) {
    for (std::size_t i = 0; i < it->second.size(); ++i) {
      add(it->second[i], KnowledgeKind::kDefaultResponse, i);
    }
  }
  if (ctx.example_index && !trim(frame.text).empty()) {
    std::vector<std::string> query;
    for (auto& t : tokenize(frame.text)) query.push_back(std::move(t.lower));
    if (auto hit = ctx.example_index->most_similar(query, ctx.config.retrieval_threshold)) {
      add(rk.example_responses[hit->id].action, KnowledgeKind::kExampleResponse,
          hit->id);
    }
  }
  for (std::size_t i = 0; i < rk.related_responses.size(); ++i) {
    const auto key = normalize_surface(rk.related_responses[i].topic_word);
    const bool hit = std::any_of(frame.slots.begin(), frame.slots.end(),
                                 [&](const SlotFill& s) {
                                   return normalize_surface(s.canonical) == key;
                                 });
    if (hit) add(rk.related_responses[i].action, KnowledgeKind::kRelatedResponse, i);
  }
  for (std::size_t i = 0; i < rk.non_responses.size(); ++i) {
    add(rk.non_responses[i], KnowledgeKind::kNonResponse, i);
  }
  return out;
}

RealizedAction select_response_action(std::span<const Candidate> candidates,
                                      const SemanticFrame& frame,
                                      const DialogueState& state,
                                      const FunctionRegistry& registry) {
  const SelectionContext ctx{kResponseExpert, frame, state};
  return candidates[registry.select(candidates, ctx)].action;
}

Expert::Score NetworkExpert::score(const SemanticFrame& frame,
                                   const DialogueState& state,
                                   std::span<const Candidate>) const {
  if (!state.active_network) return {};
  const auto& active = *state.active_network;
  if (active.just_activated) return {scores_.network_just_activated, 1};
  const Network* net = kb_.find_network(active.network);
  const NetworkState* node = net ? net->find(active.state) : nullptr;
  if (!node) return {};
  bool unconditional = false;
  for (const auto& t : node->transitions) {
    if (t.conditions.empty()) {
      unconditional = true;
    } else if (transition_matches(t, frame, state, registry_)) {
      return {scores_.network_transition, 3};
    }
  }
  if (unconditional) return {scores_.network_unconditional, 5};
  return {};
}

Expert::Score ResponseExpert::score(const SemanticFrame& frame, const DialogueState&,
                                    std::span<const Candidate> candidates) const {
  const auto& ob = config_.obligation_supertypes;
  if (frame.supertype != kUnknown &&
      std::find(ob.begin(), ob.end(), frame.supertype) != ob.end() &&
      frame.supertype_score >= obligation_threshold_) {
    return {config_.scores.response_obligation, 2};
  }
  const bool precise = std::any_of(candidates.begin(), candidates.end(), [](const Candidate& c) {
    return c.kind == KnowledgeKind::kResponsePair ||
           c.kind == KnowledgeKind::kExampleResponse;
  });
  if (precise) return {config_.scores.response_candidate, 4};
  return {config_.scores.response_fallback, 6};
}

ExpertChoice select_expert(const DialogueState& state, const SemanticFrame& frame,
                           std::span<const Candidate> response_candidates,
                           const EngineContext& ctx) {
  const double threshold =
      ctx.config.obligation_threshold.value_or(ctx.model.thresholds.supertype);
  const NetworkExpert network(ctx.kb, ctx.registry, ctx.config.scores);
  const ResponseExpert response(ctx.config, threshold);
  const auto n = network.score(frame, state, response_candidates);
  const auto r = response.score(frame, state, response_candidates);
  ExpertChoice choice;
  choice.network_score = n.value;
  choice.response_score = r.value;
  if (n.value > r.value) {
    choice.expert = std::string(network.id());
    choice.branch = n.branch;
  } else {
    choice.expert = std::string(response.id());
    choice.branch = r.branch;
  }
  return choice;
}

}  // namespace exchat
