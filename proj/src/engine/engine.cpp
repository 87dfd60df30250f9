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
#include <chrono>

#include "exchat/engine.hpp"

namespace exchat {

namespace {

void apply_settings(const RealizedAction& action, DialogueState& state) {
  for (const auto& [name, value] : action.variable_settings) {
    if (value) {
      state.variables[name] = *value;
    } else {
      state.variables.erase(name);
    }
  }
}

// Realizes the actions of a network state and lets the selector pick one.
std::optional<RealizedAction> state_action(const Network& net, const NetworkState& node,
                                           const SemanticFrame& frame,
                                           const DialogueState& state,
                                           const FunctionRegistry& registry,
                                           std::vector<std::string>& warnings) {
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < node.actions.size(); ++i) {
    ActionSource src{std::string(kNetworkExpert), KnowledgeKind::kNetwork, {},
                     net.id(), node.id};
    auto a = realize(node.actions[i], state, registry, std::move(src), &warnings);
    if (a) cands.push_back({std::move(*a), KnowledgeKind::kNetwork, i});
  }
  if (cands.empty()) return std::nullopt;
  const SelectionContext ctx{kNetworkExpert, frame, state};
  return cands[registry.select(cands, ctx)].action;
}

}  // namespace

std::vector<std::string> SystemTurn::utterances() const {
  std::vector<std::string> out;
  for (const auto& g : groups) out.insert(out.end(), g.begin(), g.end());
  return out;
}

DialogueEngine::DialogueEngine(std::shared_ptr<const KnowledgeBase> kb,
                               std::shared_ptr<const NluModel> model,
                               std::shared_ptr<const FunctionRegistry> registry,
                               EngineConfig config)
    : kb_(std::move(kb)),
      model_(std::move(model)),
      registry_(std::move(registry)),
      config_(std::move(config)),
      example_index_(build_example_index(*kb_)) {}

EngineContext DialogueEngine::context() const {
  return EngineContext{*kb_, *model_, *registry_,
                       example_index_ ? &*example_index_ : nullptr, config_};
}

namespace {

// Performs `primary` and, when it asks for one, the activated network's
// action. Fills groups, activation chain and warnings.
void perform(const KnowledgeBase& kb, const FunctionRegistry& registry,
             const SemanticFrame& frame, DialogueState& state,
             const RealizedAction& primary, SystemTurn& out) {
  auto& trace = out.trace;
  apply_settings(primary, state);
  out.groups.push_back(primary.utterance_texts);
  trace.activation_chain.push_back(primary.source);
  trace.expert = primary.source.expert;
  trace.kind = primary.source.kind;
  trace.label = primary.source.label;
  if (!primary.expert_activation) return;

  const auto& act = *primary.expert_activation;
  const Network* net = kb.find_network(act.expert_id);
  const NetworkState* node = net ? net->find(act.initial_state) : nullptr;
  if (!node) {
    trace.warnings.push_back("activation target " + act.expert_id + "/" +
                             act.initial_state + " does not exist");
    return;
  }
  auto secondary = state_action(*net, *node, frame, state, registry, trace.warnings);
  if (!secondary) {
    trace.warnings.push_back("activated state " + act.expert_id + "/" +
                             act.initial_state + " has no realizable action");
    return;
  }
  if (secondary->expert_activation) {
    trace.warnings.push_back("nested activation from " + act.expert_id + "/" +
                             act.initial_state + " ignored");
    secondary->expert_activation.reset();
  }
  state.active_network = ActiveNetwork{net->id(), node->id, true};
  std::erase(state.pending_subnetworks, node->id);
  apply_settings(*secondary, state);
  out.groups.push_back(secondary->utterance_texts);
  trace.activation_chain.push_back(secondary->source);
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

std::pair<DialogueState, SystemTurn> DialogueEngine::start_session(
    std::optional<std::string> topic, std::mt19937_64& rng,
    const std::set<std::string>& exclude) const {
  const auto t0 = std::chrono::steady_clock::now();
  if (kb_->session_topics.empty()) throw EngineError("no session topics defined");
  const SessionTopic* chosen = nullptr;
  if (topic) {
    chosen = kb_->find_topic(*topic);
    if (!chosen) throw EngineError("unknown topic: " + *topic);
  } else {
    std::vector<const SessionTopic*> open;
    for (const auto& t : kb_->session_topics) {
      if (!exclude.count(t.name)) open.push_back(&t);
    }
    if (open.empty()) throw EngineError("every session topic is excluded");
    std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
    chosen = open[pick(rng)];
  }

  DialogueState state;
  state.session_topic = chosen->name;
  state.session_network = chosen->network;
  state.pending_subnetworks = chosen->subnetwork_entries;

  SystemTurn out;
  out.trace.branch = 0;
  out.trace.selected_expert = std::string(kResponseExpert);
  out.trace.frame = SemanticFrame::unknown();
  auto opening = realize(chosen->opening, state, *registry_,
                         ActionSource{std::string(kResponseExpert),
                                      KnowledgeKind::kInitial, {}, {}, {}},
                         &out.trace.warnings);
  if (!opening) {
    throw EngineError("opening of topic " + chosen->name + " cannot be realized");
  }
  perform(*kb_, *registry_, out.trace.frame, state, *opening, out);
  registry_->run_post_selection(state, out.trace.frame, &*opening);
  clear_slot_variables(*kb_, state);
  out.trace.elapsed_ms = ms_since(t0);
  state.history.push_back(Turn{{}, out.utterances(), out.trace});
  return {std::move(state), std::move(out)};
}

SystemTurn DialogueEngine::process_turn(DialogueState& state,
                                        std::string_view user_text) const {
  const auto t0 = std::chrono::steady_clock::now();
  SemanticFrame frame;
  std::string failure;
  try {
    frame = understand(user_text, *kb_, *model_);
  } catch (const std::exception& e) {
    frame = SemanticFrame::unknown(std::string(user_text));
    failure = std::string("understanding failed: ") + e.what();
  }
  auto out = process_frame(state, frame);
  if (!failure.empty()) out.trace.warnings.insert(out.trace.warnings.begin(), failure);
  out.trace.elapsed_ms = ms_since(t0);
  state.history.back().trace = out.trace;
  state.history.back().user_text = std::string(user_text);
  return out;
}

SystemTurn DialogueEngine::process_frame(DialogueState& state,
                                         const SemanticFrame& frame) const {
  const auto t0 = std::chrono::steady_clock::now();
  const auto ctx = context();
  SystemTurn out;
  auto& trace = out.trace;
  trace.frame = frame;

  registry_->run_post_understanding(state, frame);
  apply_frame_variables(frame, state);
  const auto candidates = response_candidates(frame, ctx, state);
  const auto choice = select_expert(state, frame, candidates, ctx);
  trace.network_score = choice.network_score;
  trace.response_score = choice.response_score;
  trace.branch = choice.branch;
  trace.selected_expert = choice.expert;
  if (state.active_network) state.active_network->just_activated = false;

  std::optional<RealizedAction> primary;
  if (choice.expert == kNetworkExpert && state.active_network) {
    const auto active = *state.active_network;
    const Network* net = kb_->find_network(active.network);
    const NetworkState* node = net ? net->find(active.state) : nullptr;
    if (node) {
      auto step = network_step(*node, frame, state, *registry_);
      if (const auto* adv = std::get_if<Advance>(&step)) {
        if (const NetworkState* dest = net->find(adv->destination)) {
          primary = state_action(*net, *dest, frame, state, *registry_, trace.warnings);
          if (primary) state.active_network->state = dest->id;
        }
      }
    }
    if (!primary) {
      trace.fallback = true;
      trace.warnings.push_back("network " + active.network + " could not act at " +
                               active.state);
    }
  }
  if (!primary) {
    state.active_network.reset();
    if (candidates.empty()) {
      RealizedAction fb;
      fb.utterance_texts.push_back(config_.fallback_utterance);
      fb.source = ActionSource{std::string(kResponseExpert), KnowledgeKind::kFallback,
                               {}, {}, {}};
      primary = std::move(fb);
    } else {
      primary = select_response_action(candidates, frame, state, *registry_);
    }
  }

  perform(*kb_, *registry_, frame, state, *primary, out);
  registry_->run_post_selection(state, frame, &*primary);
  clear_slot_variables(*kb_, state);
  trace.elapsed_ms = ms_since(t0);
  state.history.push_back(Turn{frame.text, out.utterances(), trace});
  return out;
}

}  // namespace exchat
