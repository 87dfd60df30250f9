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
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "exchat/template.hpp"

namespace exchat {

// Where a knowledge item came from. Locations never take part in structural
// equality.
struct SourceLoc {
  std::string file;
  std::string path;

  friend bool operator==(const SourceLoc&, const SourceLoc&) { return true; }
};

class KnowledgeError : public std::runtime_error {
 public:
  KnowledgeError(std::string file, int line, std::string path,
                 const std::string& message);

  const std::string& file() const { return file_; }
  int line() const { return line_; }  // 0 when unknown
  const std::string& element_path() const { return path_; }

 private:
  std::string file_;
  int line_;
  std::string path_;
};

struct SlotClassDecl {
  std::string name;
  std::string description;
  bool operator==(const SlotClassDecl&) const = default;
};

struct TypeDecl {
  std::string name;
  std::string supertype;
  // Each signature is a sorted multiset of slot classes. A type with no
  // signatures accepts only utterances without slots.
  std::vector<std::vector<std::string>> signatures;

  // True when the multiset `slot_classes` equals one of the signatures.
  bool accepts(std::vector<std::string> slot_classes) const;

  bool operator==(const TypeDecl&) const = default;
};

struct ActTypeDecl {
  std::vector<std::string> supertypes;  // declaration order
  std::map<std::string, TypeDecl> types;

  bool has_supertype(std::string_view name) const;
  bool has_type(std::string_view name) const;
  const TypeDecl* find_type(std::string_view name) const;

  bool operator==(const ActTypeDecl&) const = default;
};

struct DictEntry {
  std::string canonical;
  std::string slot_class;
  std::vector<std::string> alternative_names;
  std::map<std::string, std::string> attributes;
  SourceLoc loc;

  bool operator==(const DictEntry&) const = default;
};

// Case-insensitive index over canonical and alternative names.
class Dictionary {
 public:
  Dictionary() = default;
  explicit Dictionary(std::vector<DictEntry> entries);

  // Throws KnowledgeError when two entries of one slot class claim a name.
  void add(DictEntry entry);

  const DictEntry* lookup(std::string_view surface) const;
  const DictEntry* lookup(std::string_view surface,
                          std::string_view slot_class) const;

  const std::vector<DictEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Longest normalized name, in tokens.
  std::size_t max_name_tokens() const { return max_tokens_; }

  // True when the lowercased word occurs in any name.
  bool contains_word(std::string_view lower) const {
    return words_.find(lower) != words_.end();
  }

  bool operator==(const Dictionary& o) const { return entries_ == o.entries_; }

 private:
  std::vector<DictEntry> entries_;
  // normalized surface -> entry indices in insertion order
  std::map<std::string, std::vector<std::size_t>, std::less<>> index_;
  std::set<std::string, std::less<>> words_;
  std::size_t max_tokens_ = 0;
};

struct ExpertActivation {
  std::string expert_id;
  UtteranceTemplate initial_state;
  std::map<std::string, std::string> args;

  bool operator==(const ExpertActivation&) const = default;
};

struct VariableSetting {
  std::string variable;
  std::optional<Expr> value;  // nullopt clears the variable

  bool operator==(const VariableSetting&) const = default;
};

struct ActionDescription {
  std::optional<std::string> label;
  std::optional<FunctionCall> condition;
  std::vector<UtteranceTemplate> utterances;
  std::vector<VariableSetting> variable_settings;
  std::optional<ExpertActivation> expert_activation;
  SourceLoc loc;

  bool operator==(const ActionDescription&) const = default;
};

struct SupertypeIs {
  std::string name;
  bool operator==(const SupertypeIs&) const = default;
};

struct TypeIs {
  std::string name;
  bool operator==(const TypeIs&) const = default;
};

using TransitionCondition = std::variant<SupertypeIs, TypeIs, FunctionCall>;

struct Transition {
  std::vector<TransitionCondition> conditions;  // empty: unconditional
  std::string destination;
  SourceLoc loc;

  bool operator==(const Transition&) const = default;
};

struct NetworkState {
  std::string id;
  std::vector<ActionDescription> actions;
  std::vector<Transition> transitions;
  SourceLoc loc;

  bool operator==(const NetworkState&) const = default;
};

class Network {
 public:
  Network() = default;
  explicit Network(std::string id, SourceLoc loc = {});

  const std::string& id() const { return id_; }
  const SourceLoc& loc() const { return loc_; }

  // States in file order.
  const std::vector<NetworkState>& states() const { return states_; }
  const NetworkState* find(std::string_view state_id) const;
  bool contains(std::string_view state_id) const {
    return find(state_id) != nullptr;
  }

  // Returns false when the id is already taken.
  bool add_state(NetworkState state);

  bool operator==(const Network& o) const {
    return id_ == o.id_ && states_ == o.states_;
  }

 private:
  std::string id_;
  SourceLoc loc_;
  std::vector<NetworkState> states_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

struct ExampleResponse {
  std::string example_utterance;
  ActionDescription action;
  bool operator==(const ExampleResponse&) const = default;
};

struct RelatedResponse {
  std::string topic_word;
  ActionDescription action;
  bool operator==(const RelatedResponse&) const = default;
};

struct ResponseKnowledge {
  std::map<std::string, std::vector<ActionDescription>> response_pairs;
  std::map<std::string, std::vector<ActionDescription>> default_responses;
  std::vector<ExampleResponse> example_responses;
  std::vector<RelatedResponse> related_responses;
  std::vector<ActionDescription> non_responses;

  bool empty() const;
  bool operator==(const ResponseKnowledge&) const = default;
};

struct SessionTopic {
  std::string name;
  ActionDescription opening;
  std::string network;  // network holding the subnetwork entry states
  std::vector<std::string> subnetwork_entries;
  SourceLoc loc;

  bool operator==(const SessionTopic&) const = default;
};

struct KnowledgeBase {
  std::vector<SlotClassDecl> slot_classes;
  ActTypeDecl act_types;
  Dictionary dictionary;
  ResponseKnowledge responses;
  std::map<std::string, Network> networks;
  std::vector<SessionTopic> session_topics;

  bool has_slot_class(std::string_view name) const;
  const Network* find_network(std::string_view id) const;
  const SessionTopic* find_topic(std::string_view name) const;

  // True for names of the form <declared slot class><digits>, e.g.
  // "food-drink2".
  bool is_slot_variable(std::string_view name) const;

  bool operator==(const KnowledgeBase&) const = default;
};

// Parses the act-type/slot-class declarations file and the knowledge files
// (dictionary, responses, networks, topics) into a cross-checked knowledge
// base. Throws KnowledgeError.
KnowledgeBase load_knowledge(std::span<const std::filesystem::path> files,
                             const std::filesystem::path& declarations);

// In-memory variants used by tests and tools; `name` stands in for a file
// name in error messages.
struct XmlSource {
  std::string name;
  std::string text;
};
KnowledgeBase load_knowledge_from_strings(std::span<const XmlSource> files,
                                          const XmlSource& declarations);

// Writes declarations and knowledge back to XML that re-loads to an equal
// knowledge base.
std::string serialize_declarations(const KnowledgeBase& kb);
std::string serialize_knowledge(const KnowledgeBase& kb);
std::string serialize_action(const ActionDescription& action);

// Plain CSV dictionary conversion. Columns: class, name, alternatives
// separated by ';', attributes as key=value pairs separated by ';'.
// A header row starting with "class" is skipped.
std::vector<DictEntry> parse_dictionary_csv(std::string_view csv);
std::string dictionary_to_xml(std::span<const DictEntry> entries);

const DictEntry* dictionary_lookup(std::string_view surface,
                                   const Dictionary& dict);

}  // namespace exchat
