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

#include "exchat/minifood.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "exchat/text.hpp"

namespace exchat::minifood {

namespace {

std::string key(std::string_view s) { return normalize_surface(s); }

bool same(std::string_view a, std::string_view b) { return key(a) == key(b); }

}  // namespace

FoodGraph::FoodGraph(std::vector<Relation> relations)
    : relations_(std::move(relations)) {
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    by_subject_.emplace(key(relations_[i].subject), i);
  }
}

FoodGraph FoodGraph::parse(std::string_view tsv) {
  std::vector<Relation> out;
  std::istringstream in{std::string(tsv)};
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      cols.emplace_back(trim(std::string_view(line).substr(start, tab - start)));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() < 3) {
      throw std::runtime_error("relations line " + std::to_string(n) +
                               ": expected subject, relation and object");
    }
    out.push_back({cols[0], cols[1], cols[2]});
  }
  return FoodGraph(std::move(out));
}

FoodGraph FoodGraph::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::vector<std::string> FoodGraph::objects(std::string_view subject,
                                            std::string_view relation) const {
  std::vector<std::size_t> idx;
  auto [lo, hi] = by_subject_.equal_range(key(subject));
  for (auto it = lo; it != hi; ++it) {
    if (relations_[it->second].relation == relation) idx.push_back(it->second);
  }
  std::sort(idx.begin(), idx.end());
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(relations_[i].object);
  return out;
}

bool FoodGraph::holds(std::string_view subject, std::string_view relation,
                      std::string_view object) const {
  for (const auto& o : objects(subject, relation)) {
    if (same(o, object)) return true;
  }
  return false;
}

FunctionRegistry make_registry(std::shared_ptr<const KnowledgeBase> kb,
                               std::shared_ptr<const FoodGraph> graph) {
  auto r = FunctionRegistry::with_builtins();
  using Args = FunctionRegistry::Args;

  auto likes = [graph](std::string_view x) { return graph->holds("system", "likes", x); };
  auto entry = [kb](std::string_view x, std::string_view cls) {
    return kb->dictionary.lookup(x, cls);
  };
  auto arg1 = [](Args a) -> const std::string& {
    if (a.size() != 1) throw std::invalid_argument("expected one argument");
    return a[0];
  };

  r.add_bool("like", [=](Args a, const DialogueState&) { return likes(arg1(a)); });
  r.add_bool("known_food", [=](Args a, const DialogueState&) {
    return entry(arg1(a), "food-drink") != nullptr;
  });
  r.add_bool("known_place", [=](Args a, const DialogueState&) {
    return entry(arg1(a), "place") != nullptr;
  });
  r.add_bool("known_time", [=](Args a, const DialogueState&) {
    return entry(arg1(a), "time-event") != nullptr;
  });
  r.add_bool("isPizza", [=](Args a, const DialogueState&) {
    const auto& x = arg1(a);
    return graph->holds(x, "is-a", "pizza") || same(x, "pizza");
  });
  r.add_bool("isCoffeeShop", [=](Args a, const DialogueState&) {
    return graph->holds(arg1(a), "is-a", "coffee shop");
  });
  r.add_string("get_similar_food",
               [=](Args a, const DialogueState&) -> std::optional<std::string> {
                 auto v = graph->objects(arg1(a), "similar-to");
                 if (v.empty()) return std::nullopt;
                 return v.front();
               });
  r.add_string("cuisine_of",
               [=](Args a, const DialogueState&) -> std::optional<std::string> {
                 auto v = graph->objects(arg1(a), "cuisine");
                 if (v.empty()) return std::nullopt;
                 return v.front();
               });
  r.add_string("prefer",
               [=](Args a, const DialogueState&) -> std::optional<std::string> {
                 if (a.size() != 2) throw std::invalid_argument("expected two arguments");
                 if (likes(a[0])) return a[0];
                 if (likes(a[1])) return a[1];
                 return std::nullopt;
               });

  r.set_action_selector(ordered_question_selector);
  r.declare_variable("last_food");
  r.add_post_understanding_hook(
      [](DialogueState& state, const SemanticFrame& frame, const RealizedAction*) {
        for (const auto& s : frame.slots) {
          if (s.slot_class == "food-drink") {
            state.variables["last_food"] = s.canonical;
            break;
          }
        }
      });
  return r;
}

std::size_t ordered_question_selector(std::span<const Candidate> candidates,
                                      const SelectionContext& ctx) {
  std::size_t choice = default_action_selector(candidates, ctx);
  const int rank = default_kind_rank(candidates[choice].kind);
  if (candidates[choice].kind == KnowledgeKind::kNonResponse) {
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const auto& c = candidates[i];
      if (c.kind == KnowledgeKind::kNonResponse && c.action.expert_activation) {
        return i;
      }
    }
  }
  if (ctx.state.history.empty()) return choice;
  const auto& last = ctx.state.history.back().utterances;
  auto repeats = [&](const Candidate& c) {
    return !c.action.utterance_texts.empty() &&
           std::search(last.begin(), last.end(), c.action.utterance_texts.begin(),
                       c.action.utterance_texts.end()) != last.end();
  };
  if (!repeats(candidates[choice])) return choice;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (i != choice && default_kind_rank(candidates[i].kind) == rank &&
        !repeats(candidates[i])) {
      return i;
    }
  }
  return choice;
}

}  // namespace exchat::minifood
