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

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exchat/knowledge.hpp"
#include "exchat/registry.hpp"

namespace exchat::minifood {

struct Relation {
  std::string subject;
  std::string relation;
  std::string object;

  bool operator==(const Relation&) const = default;
};

// In-memory food graph: subject/relation/object triples keyed
// case-insensitively by subject.
class FoodGraph {
 public:
  FoodGraph() = default;
  explicit FoodGraph(std::vector<Relation> relations);

  // Tab-separated lines: subject, relation, object. Blank lines and lines
  // starting with '#' are skipped. Throws std::runtime_error on a short row.
  static FoodGraph parse(std::string_view tsv);
  static FoodGraph load(const std::filesystem::path& path);

  // Objects of `relation` for `subject`, in file order.
  std::vector<std::string> objects(std::string_view subject,
                                   std::string_view relation) const;
  bool holds(std::string_view subject, std::string_view relation,
             std::string_view object) const;

  std::size_t size() const { return relations_.size(); }

 private:
  std::vector<Relation> relations_;
  std::multimap<std::string, std::size_t> by_subject_;
};

// Domain functions:
//   like(x)                system likes x
//   known_food(x)          x is a food-drink entry
//   known_place(x)         x is a place entry
//   known_time(x)          x is a time-event entry
//   isPizza(x)             x is a pizza
//   isCoffeeShop(x)        x is a coffee shop
//   get_similar_food(x)    a food similar to x
//   cuisine_of(x)          cuisine of x
//   prefer(a, b)           whichever of a and b the system likes, a first
// plus the built-ins. The post-understanding hook remembers the last food
// mentioned in `last_food`.
FunctionRegistry make_registry(std::shared_ptr<const KnowledgeBase> kb,
                               std::shared_ptr<const FoodGraph> graph);

// Default priority, except that a non-response which moves on to the next
// question wins over the other non-responses, and a candidate repeating the
// previous system turn loses to an equally ranked alternative.
std::size_t ordered_question_selector(std::span<const Candidate> candidates,
                                      const SelectionContext& ctx);

}  // namespace exchat::minifood
