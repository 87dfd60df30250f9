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

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "exchat/knowledge.hpp"
#include "exchat/nlu.hpp"
#include "exchat/registry.hpp"
#include "exchat/retrieval.hpp"
#include "exchat/state.hpp"

namespace exchat {

// Scores returned by the two expert classes. Their ordering reproduces the
// six-branch selection rule; see select_expert.
struct ExpertScores {
  double network_just_activated = 1.0;  // branch 1
  double response_obligation = 0.8;     // branch 2
  double network_transition = 0.6;      // branch 3
  double response_candidate = 0.5;      // branch 4
  double network_unconditional = 0.4;   // branch 5
  double response_fallback = 0.1;       // branch 6
};

struct EngineConfig {
  std::vector<std::string> obligation_supertypes{"ask-yes-no-question",
                                                 "request-information"};
  // Defaults to the supertype threshold of the model when unset.
  std::optional<double> obligation_threshold;
  double retrieval_threshold = 0.55;
  ExpertScores scores;
  std::string fallback_utterance = "I see.";
};

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Substitutes variables and function results into `desc`. Returns nullopt
// when the condition fails, a variable is unset, a function is missing or
// returns nothing, or a function throws. Exceptions are reported to
// `warnings` when given.
std::optional<RealizedAction> realize(const ActionDescription& desc,
                                      const DialogueState& state,
                                      const FunctionRegistry& registry,
                                      ActionSource source = {},
                                      std::vector<std::string>* warnings = nullptr);

// Stores slot fills as <class><index> variables.
void apply_frame_variables(const SemanticFrame& frame, DialogueState& state);

// Removes every <declared slot class><digits> variable.
void clear_slot_variables(const KnowledgeBase& kb, DialogueState& state);

struct Advance {
  std::string destination;
  bool operator==(const Advance&) const = default;
};
struct NoMatch {
  bool operator==(const NoMatch&) const = default;
};
using StepResult = std::variant<Advance, NoMatch>;

bool condition_holds(const TransitionCondition& cond, const SemanticFrame& frame,
                     const DialogueState& state, const FunctionRegistry& registry);
bool transition_matches(const Transition& t, const SemanticFrame& frame,
                        const DialogueState& state, const FunctionRegistry& registry);

// First transition, in file order, whose conditions all hold.
StepResult network_step(const NetworkState& current, const SemanticFrame& frame,
                        const DialogueState& state, const FunctionRegistry& registry);

// The parts of the knowledge, model and functions an engine turn needs.
struct EngineContext {
  const KnowledgeBase& kb;
  const NluModel& model;
  const FunctionRegistry& registry;
  const TfIdfIndex* example_index;  // null when the KB has no example responses
  const EngineConfig& config;
};

// Builds the tf-idf index over the example-response utterances; doc ids are
// positions in kb.responses.example_responses.
std::optional<TfIdfIndex> build_example_index(const KnowledgeBase& kb);

std::vector<Candidate> response_candidates(const SemanticFrame& frame,
                                           const EngineContext& ctx,
                                           const DialogueState& state);

RealizedAction select_response_action(std::span<const Candidate> candidates,
                                      const SemanticFrame& frame,
                                      const DialogueState& state,
                                      const FunctionRegistry& registry);

struct ExpertChoice {
  std::string expert;
  int branch = 6;
  double network_score = 0.0;
  double response_score = 0.0;

  bool operator==(const ExpertChoice&) const = default;
};

// An expert scores the current input; the highest score wins. Scores are the
// per-branch constants in ExpertScores.
class Expert {
 public:
  struct Score {
    double value = 0.0;
    int branch = 0;  // branch that produced this score, 0 for none
  };

  virtual ~Expert() = default;
  virtual std::string_view id() const = 0;
  virtual Score score(const SemanticFrame& frame, const DialogueState& state,
                      std::span<const Candidate> response_candidates) const = 0;
};

class NetworkExpert final : public Expert {
 public:
  NetworkExpert(const KnowledgeBase& kb, const FunctionRegistry& registry,
                const ExpertScores& scores)
      : kb_(kb), registry_(registry), scores_(scores) {}

  std::string_view id() const override { return kNetworkExpert; }
  Score score(const SemanticFrame& frame, const DialogueState& state,
              std::span<const Candidate> response_candidates) const override;

 private:
  const KnowledgeBase& kb_;
  const FunctionRegistry& registry_;
  const ExpertScores& scores_;
};

class ResponseExpert final : public Expert {
 public:
  ResponseExpert(const EngineConfig& config, double obligation_threshold)
      : config_(config), obligation_threshold_(obligation_threshold) {}

  std::string_view id() const override { return kResponseExpert; }
  Score score(const SemanticFrame& frame, const DialogueState& state,
              std::span<const Candidate> response_candidates) const override;

 private:
  const EngineConfig& config_;
  double obligation_threshold_;
};

ExpertChoice select_expert(const DialogueState& state, const SemanticFrame& frame,
                           std::span<const Candidate> response_candidates,
                           const EngineContext& ctx);

struct SystemTurn {
  // One entry per performed action: the primary expert's action, then the
  // activated expert's action when there was an activation.
  std::vector<std::vector<std::string>> groups;
  ExpertTrace trace;

  std::vector<std::string> utterances() const;
};

// Owns the shared, read-only pieces of a dialogue system and runs turns on
// caller-owned dialogue states.
class DialogueEngine {
 public:
  DialogueEngine(std::shared_ptr<const KnowledgeBase> kb,
                 std::shared_ptr<const NluModel> model,
                 std::shared_ptr<const FunctionRegistry> registry,
                 EngineConfig config = {});

  // Picks `topic` or, when empty, a uniformly random topic not in `exclude`.
  // Throws EngineError for an unknown topic or when every topic is excluded.
  std::pair<DialogueState, SystemTurn> start_session(
      std::optional<std::string> topic, std::mt19937_64& rng,
      const std::set<std::string>& exclude = {}) const;

  // Never throws for bad input: understanding failures fall back to an
  // all-UNKNOWN frame.
  SystemTurn process_turn(DialogueState& state, std::string_view user_text) const;

  // The same pipeline with understanding already done.
  SystemTurn process_frame(DialogueState& state, const SemanticFrame& frame) const;

  const KnowledgeBase& kb() const { return *kb_; }
  const NluModel& model() const { return *model_; }
  const FunctionRegistry& registry() const { return *registry_; }
  const EngineConfig& config() const { return config_; }
  EngineContext context() const;

 private:
  std::shared_ptr<const KnowledgeBase> kb_;
  std::shared_ptr<const NluModel> model_;
  std::shared_ptr<const FunctionRegistry> registry_;
  EngineConfig config_;
  std::optional<TfIdfIndex> example_index_;
};

}  // namespace exchat
