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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <regex>
#include <sstream>

#include "exchat/cli.hpp"
#include "exchat/service.hpp"
#include "exchat/template.hpp"
#include "exchat/validate.hpp"
#include "scenarios.hpp"

namespace exchat {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Tolerances and limits.
constexpr double kCoffeeReplaySeconds = 1.0;
constexpr double kSupertypeAccuracyMin = 0.85;
constexpr double kSlotF1Min = 0.90;
constexpr double kSimilarityTolerance = 1e-9;
constexpr double kP99TurnMsMax = 50.0;
constexpr double kFullReplaySeconds = 1.0;
constexpr int kRandomBranchCases = 1000;
constexpr int kLifecycleTurns = 500;
constexpr int kPersistMinTurns = 3;
constexpr int kTfIdfQueries = 100;
constexpr int kTfIdfDocs = 20;
constexpr int kLatencyTurns = 200;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  std::istringstream in;
  std::ostringstream out, err;
  const int code = run_cli(args, in, out, err);
  if (out_text) *out_text = out.str();
  return code;
}

const fs::path kConfig = testing::minifood_dir() / "config.json";
const fs::path kScripts = testing::minifood_dir() / "scripts";

Outcome coffee_golden() {
  // The dialogue exactly as it must appear, independent of the stored golden.
  const std::string expected =
      "System: Do you often go to coffee shops?\n"
      "User: Yes.\n"
      "System: Which coffee shops do you like?\n"
      "User: I like Tully's.\n"
      "System: I like Tully's, too!\n";
  if (read_file(kScripts / "coffee.golden") != expected) {
    return {false, "stored golden differs from the dialogue"};
  }
  const auto t0 = Clock::now();
  std::string out;
  const int code = cli({"replay", (kScripts / "coffee.txt").string(), "-c", kConfig.string(),
                        "-g", (kScripts / "coffee.golden").string()},
                       &out);
  const double secs = seconds_since(t0);
  const bool same = out.compare(0, expected.size(), expected) == 0;
  std::ostringstream d;
  d << "exit " << code << ", " << secs << " s";
  return {code == 0 && same && secs < kCoffeeReplaySeconds, d.str()};
}

Outcome pizza_realization() {
  const auto app = load_app(load_config(kConfig));
  ActionDescription a;
  a.utterances.push_back(
      UtteranceTemplate::parse("*food1* is great. Do you also like *get_similar_food(food1)*?"));
  DialogueState s;
  s.variables["food1"] = "BBQ chicken pizza";
  const auto r = realize(a, s, *app.registry);
  const bool set_ok =
      r && r->utterance_texts ==
               std::vector<std::string>{
                   "BBQ chicken pizza is great. Do you also like smoked chicken pizza?"};
  const bool unset_ok = !realize(a, DialogueState{}, *app.registry);
  return {set_ok && unset_ok, std::string("set: ") + (set_ok ? "ok" : "wrong") +
                                  ", unset: " + (unset_ok ? "no action" : "realized")};
}

Outcome decision_table() {
  const testing::CoffeeEngine c;
  int fixtures_ok = 0;
  for (const auto& k : testing::branch_cases(c)) {
    const auto got = c.choose(k.state, k.frame);
    if (got.expert == k.expert && got.branch == k.branch) ++fixtures_ok;
  }
  const auto r = testing::random_branch_run(c, kRandomBranchCases, 20261016);
  std::ostringstream d;
  d << fixtures_ok << "/6 fixtures, " << r.cases << " random cases, " << r.disagreements
    << " disagreements, " << r.out_of_range << " out of range";
  if (!r.first_failure.empty()) d << " (" << r.first_failure << ")";
  return {fixtures_ok == 6 && r.cases == kRandomBranchCases && r.disagreements == 0 &&
              r.out_of_range == 0,
          d.str()};
}

Outcome slot_lifecycle() {
  const auto app = load_app(load_config(kConfig));
  const auto& engine = *app.engine;
  const std::regex slot_var("^(food-drink|place|time-event)[0-9]+$");
  const std::vector<std::string> pool{
      "Yes.", "No.", "I like ramen.", "Did you have sushi yesterday?",
      "Which do you like, tea or coffee?", "I went to Kyoto.", "I like Tully's.",
      "What is your name?", "Do you like pizza?", "I ate pancakes this morning.",
      "zzz qqq", "Hello!", "I'm tired.", "Bye.", "I usually eat toast with butter."};
  std::mt19937_64 rng(7);
  std::set<std::string> all_topics;
  for (const auto& t : engine.kb().session_topics) all_topics.insert(t.name);

  int leaks = 0, turns = 0;
  auto [state, opening] = engine.start_session(std::nullopt, rng);
  for (int i = 0; i < kLifecycleTurns; ++i) {
    if (i % 15 == 14) std::tie(state, opening) = engine.start_session(std::nullopt, rng);
    engine.process_turn(state, pool[rng() % pool.size()]);
    ++turns;
    for (const auto& [name, _] : state.variables) {
      if (std::regex_match(name, slot_var)) ++leaks;
    }
  }

  // A persistent variable set by an action survives later turns.
  auto [s2, o2] = engine.start_session("sweets", rng);
  engine.process_turn(s2, "I like cake.");
  engine.process_turn(s2, "I like ramen.");
  int survived = 0;
  const auto set_value = s2.variable("topic");
  for (const char* u : {"Yes.", "What is your name?", "zzz qqq", "No."}) {
    engine.process_turn(s2, u);
    if (s2.variable("topic") == set_value && set_value == std::optional<std::string>("ramen")) {
      ++survived;
    }
  }
  std::ostringstream d;
  d << turns << " turns, " << leaks << " leaked slot variables, topic kept for " << survived
    << " turns";
  return {leaks == 0 && turns == kLifecycleTurns && survived >= kPersistMinTurns, d.str()};
}

Outcome nlu_metrics() {
  const auto kb = testing::load_minifood_kb();
  const auto examples = load_training_file(testing::minifood_dir() / "training.jsonl");
  const auto split = split_examples(examples, 0.2, 1);
  auto train = split.train;
  const auto extra = augment_examples(split.train, kb.dictionary, 4);
  train.insert(train.end(), extra.begin(), extra.end());
  TrainConfig tc;
  tc.params.seed = 1;
  tc.declarations = &kb.act_types;
  tc.dictionary = &kb.dictionary;
  const auto model = train_nlu(train, tc).model;
  const auto m = evaluate(model, kb, split.heldout);

  const auto shipped = NluModel::load(testing::minifood_dir() / "model.json");
  const auto f = understand("Did you have sushi yesterday?", kb, shipped);
  std::vector<std::tuple<std::string, std::string, int>> slots;
  for (const auto& s : f.slots) slots.emplace_back(s.slot_class, s.canonical, s.order_index);
  std::sort(slots.begin(), slots.end());
  const bool frame_ok =
      f.supertype == "ask-yes-no-question" && f.type == "ask-if-system-ate" &&
      slots == decltype(slots){{"food-drink", "sushi", 1}, {"time-event", "yesterday", 1}};

  std::ostringstream d;
  d << "held-out " << split.heldout.size() << ": supertype accuracy " << m.supertype_accuracy
    << ", slot F1 " << m.slot_f1 << ", sushi frame " << (frame_ok ? "exact" : "wrong");
  return {m.supertype_accuracy >= kSupertypeAccuracyMin && m.slot_f1 >= kSlotF1Min && frame_ok,
          d.str()};
}

Outcome tfidf_oracle() {
  static const std::vector<std::string> vocab{
      "do", "you", "like", "ramen", "sushi", "coffee", "tea", "what", "is", "your",
      "name", "where", "are", "from", "can", "cook", "eat", "drink", "often", "?",
      "spicy", "food", "shop", "morning", "breakfast"};
  std::mt19937_64 rng(99);
  auto text = [&] {
    std::vector<std::string> d;
    for (std::size_t k = 1 + rng() % 8; k > 0; --k) d.push_back(vocab[rng() % vocab.size()]);
    return d;
  };
  std::vector<std::vector<std::string>> corpus;
  std::vector<Document> docs;
  for (int i = 0; i < kTfIdfDocs; ++i) {
    corpus.push_back(text());
    docs.push_back({static_cast<DocId>(i), corpus.back()});
  }
  const auto index = TfIdfIndex::build(docs);
  const testing::BruteForceTfIdf oracle(corpus);
  int agree = 0;
  for (int q = 0; q < kTfIdfQueries; ++q) {
    const auto query = text();
    const auto want = oracle.best(query, 0.0);
    const auto got = index.most_similar(query, 0.0);
    if (!want && !got) {
      ++agree;
    } else if (want && got && got->id == want->first &&
               std::abs(got->similarity - want->second) <= kSimilarityTolerance) {
      ++agree;
    }
  }
  return {agree == kTfIdfQueries,
          std::to_string(agree) + "/" + std::to_string(kTfIdfQueries) + " queries agree"};
}

Outcome lint_detection() {
  const auto dir = testing::fixture_dir("lint_defects");
  const auto kb = load_knowledge(
      testing::in_dir(dir, {"dictionary.xml", "responses.xml", "network-pizza.xml", "topics.xml"}),
      dir / "declarations.xml");
  auto registry = FunctionRegistry::with_builtins();
  registry.add_bool("like", [](auto, const auto&) { return true; });
  registry.add_bool("isCoffeeShop", [](auto, const auto&) { return true; });
  registry.add_string("get_similar_food",
                      [](auto, const auto&) -> std::optional<std::string> { return "x"; });
  const auto diags = validate(kb, registry);

  std::ifstream expected(dir / "expected.tsv");
  std::string line;
  int seeded = 0, found = 0;
  std::set<const Diagnostic*> matched;
  while (std::getline(expected, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    const auto code = line.substr(0, tab);
    const auto needle = line.substr(tab + 1);
    ++seeded;
    for (const auto& d : diags) {
      if (d.code == code && d.message.find(needle) != std::string::npos) {
        ++found;
        matched.insert(&d);
        break;
      }
    }
  }
  int stray_errors = 0;
  for (const auto& d : diags) {
    if (d.severity == Severity::kError && !matched.count(&d)) ++stray_errors;
  }

  auto coffee = std::make_shared<const KnowledgeBase>(testing::load_coffee_kb());
  auto graph = std::make_shared<const minifood::FoodGraph>(
      minifood::FoodGraph::load(testing::fixture_dir("coffee") / "relations.tsv"));
  const auto clean_errors = count_errors(validate(*coffee, minifood::make_registry(coffee, graph)));
  const auto app = load_app(load_config(kConfig));
  const auto minifood_errors = count_errors(validate(*app.kb, *app.registry));

  std::ostringstream d;
  d << found << "/" << seeded << " seeded defects, " << stray_errors
    << " unexpected errors, clean KB errors " << clean_errors + minifood_errors;
  return {seeded == 10 && found == seeded && stray_errors == 0 && clean_errors == 0 &&
              minifood_errors == 0,
          d.str()};
}

Outcome latency() {
  ChatService svc(load_app(load_config(kConfig)), 5);
  const std::vector<std::string> pool{
      "Yes.", "No.", "I like ramen.", "Did you have sushi yesterday?",
      "Which do you like, tea or coffee?", "What is your name?", "I went to Kyoto.",
      "I drink coffee every morning.", "Do you like spicy food?", "I'm hungry."};
  std::vector<double> ms;
  std::string id;
  for (int i = 0; i < kLatencyTurns; ++i) {
    if (i % svc.app().config.max_turns == 0) {
      id = svc.create_session(std::nullopt).at("session_id").get<std::string>();
    }
    const auto t0 = Clock::now();
    svc.post_utterance(id, pool[i % pool.size()]);
    ms.push_back(seconds_since(t0) * 1000.0);
  }
  std::sort(ms.begin(), ms.end());
  const double p99 = ms[static_cast<std::size_t>(std::ceil(0.99 * ms.size())) - 1];

  const auto t0 = Clock::now();
  const int code = cli({"replay", (kScripts / "breakfast15.txt").string(), "-c",
                        kConfig.string(), "-g", (kScripts / "breakfast15.golden").string()});
  const double replay_s = seconds_since(t0);
  std::ostringstream d;
  d << "p99 " << p99 << " ms over " << ms.size() << " turns, 15-turn replay " << replay_s
    << " s (exit " << code << ")";
  return {p99 <= kP99TurnMsMax && code == 0 && replay_s <= kFullReplaySeconds, d.str()};
}

Outcome frequency_identity() {
  std::string out;
  const int code =
      cli({"replay", (kScripts / "breakfast15.txt").string(), "-c", kConfig.string()}, &out);
  std::istringstream in(out);
  std::string l;
  int system_turns = 0, sum = 0, total = -1;
  bool table = false;
  while (std::getline(in, l)) {
    if (l.rfind("System: ", 0) == 0) ++system_turns;
    if (l.rfind("expert (knowledge)", 0) == 0) {
      table = true;
      continue;
    }
    if (!table || l.empty()) continue;
    const int n = std::stoi(l.substr(l.find_last_of(' ') + 1));
    if (l.rfind("total", 0) == 0) {
      total = n;
    } else {
      sum += n;
    }
  }
  std::ostringstream d;
  d << "rows sum " << sum << ", total " << total << ", system turns " << system_turns;
  return {code == 0 && sum == total && total == system_turns && system_turns == 16, d.str()};
}

}  // namespace
}  // namespace exchat

int main() {
  using exchat::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"coffee-shop golden transcript", exchat::coffee_golden},
      {"pizza realization", exchat::pizza_realization},
      {"expert-selection decision table", exchat::decision_table},
      {"slot-variable lifecycle", exchat::slot_lifecycle},
      {"NLU fixture metrics", exchat::nlu_metrics},
      {"tf-idf oracle equivalence", exchat::tfidf_oracle},
      {"lint seeded defects", exchat::lint_detection},
      {"latency", exchat::latency},
      {"frequency-report identity", exchat::frequency_identity},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  (" << o.detail << ")\n";
  }
  return failures == 0 ? 0 : 1;
}
