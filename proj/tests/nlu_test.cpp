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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "exchat/nlu.hpp"
#include "support.hpp"

namespace exchat {
namespace {

std::vector<std::string> lowers(const std::vector<Token>& toks) {
  std::vector<std::string> out;
  for (const auto& t : toks) out.push_back(t.lower);
  return out;
}

std::vector<std::pair<std::string, std::string>> slot_multiset(const SemanticFrame& f) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& s : f.slots) out.emplace_back(s.slot_class, s.canonical);
  std::sort(out.begin(), out.end());
  return out;
}

class MiniFoodNlu : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    kb_ = new KnowledgeBase(testing::load_minifood_kb());
    model_ = new NluModel(NluModel::load(testing::minifood_dir() / "model.json"));
  }
  static void TearDownTestSuite() {
    delete kb_;
    delete model_;
  }
  static KnowledgeBase* kb_;
  static NluModel* model_;
};
KnowledgeBase* MiniFoodNlu::kb_ = nullptr;
NluModel* MiniFoodNlu::model_ = nullptr;

TEST(Tokenize, SplitsWordsAndPunctuation) {
  EXPECT_EQ(lowers(tokenize("Did you have sushi yesterday?")),
            (std::vector<std::string>{"did", "you", "have", "sushi", "yesterday", "?"}));
}

TEST(Tokenize, KeepsOnlyLastSentence) {
  EXPECT_EQ(lowers(tokenize("Hello. Did you have sushi yesterday?")),
            lowers(tokenize("Did you have sushi yesterday?")));
}

TEST(Tokenize, BlankInputThrows) {
  EXPECT_THROW(tokenize("   "), EmptyInputError);
  EXPECT_THROW(tokenize(""), EmptyInputError);
}

TEST(Tokenize, SurfacesRebuildNormalizedText) {
  const auto toks = tokenize("I like Tully's, really!");
  std::string joined;
  for (const auto& t : toks) joined += (joined.empty() ? "" : " ") + t.surface;
  EXPECT_EQ(joined, "I like Tully's , really !");
  for (std::size_t i = 0; i < toks.size(); ++i) EXPECT_EQ(toks[i].position, i);
}

TEST_F(MiniFoodNlu, ExtractSlotsSushiYesterday) {
  const auto slots = extract_slots(tokenize("Did you have sushi yesterday?"), kb_->dictionary,
                                   *model_);
  ASSERT_EQ(slots.size(), 2u);
  SemanticFrame f;
  f.slots = slots;
  EXPECT_EQ(slot_multiset(f), (std::vector<std::pair<std::string, std::string>>{
                                  {"food-drink", "sushi"}, {"time-event", "yesterday"}}));
  for (const auto& s : slots) EXPECT_EQ(s.order_index, 1);
}

TEST_F(MiniFoodNlu, ExtractSlotsKeepsSurfaceOrder) {
  const auto slots = extract_slots(tokenize("which do you like, tea or coffee?"),
                                   kb_->dictionary, *model_);
  ASSERT_EQ(slots.size(), 2u);
  EXPECT_EQ(slots[0].canonical, "tea");
  EXPECT_EQ(slots[0].order_index, 1);
  EXPECT_EQ(slots[1].canonical, "coffee");
  EXPECT_EQ(slots[1].order_index, 2);
}

TEST_F(MiniFoodNlu, NoDictionaryHitAndNoLabelsGivesNoSlots) {
  const auto slots = extract_slots(tokenize("hmm okay then"), kb_->dictionary, *model_);
  EXPECT_TRUE(slots.empty());
}

TEST_F(MiniFoodNlu, LongestMatchWins) {
  const auto slots = match_dictionary(tokenize("I love tonkotsu ramen"), kb_->dictionary);
  ASSERT_EQ(slots.size(), 1u);
  EXPECT_EQ(slots[0].canonical, "tonkotsu ramen");
}

TEST_F(MiniFoodNlu, PredictSushiQuestion) {
  const auto toks = tokenize("Did you have sushi yesterday?");
  const auto slots = extract_slots(toks, kb_->dictionary, *model_);
  const auto p = predict_acts(toks, slots, *model_, kb_->act_types);
  EXPECT_EQ(p.supertype, "ask-yes-no-question");
  EXPECT_GE(p.supertype_score, model_->thresholds.supertype);
  EXPECT_EQ(p.type, "ask-if-system-ate");
  EXPECT_GE(p.type_score, model_->thresholds.type);
}

TEST_F(MiniFoodNlu, GibberishIsUnknown) {
  const auto f = understand("zxq vlorp blint", *kb_, *model_);
  EXPECT_EQ(f.supertype, kUnknown);
  EXPECT_LT(f.supertype_score, model_->thresholds.supertype);
  EXPECT_EQ(f.type, kUnknown);
}

TEST_F(MiniFoodNlu, UnderstandSushiFrame) {
  const auto f = understand("Did you have sushi yesterday?", *kb_, *model_);
  EXPECT_EQ(f.supertype, "ask-yes-no-question");
  EXPECT_EQ(f.type, "ask-if-system-ate");
  EXPECT_EQ(slot_multiset(f), (std::vector<std::pair<std::string, std::string>>{
                                  {"food-drink", "sushi"}, {"time-event", "yesterday"}}));
}

TEST_F(MiniFoodNlu, UnderstandYes) {
  const auto f = understand("yes.", *kb_, *model_);
  EXPECT_EQ(f.supertype, "acknowledge");
  EXPECT_TRUE(f.slots.empty());
}

TEST_F(MiniFoodNlu, UnderstandEmptyThrows) {
  EXPECT_THROW(understand("", *kb_, *model_), EmptyInputError);
}

TEST_F(MiniFoodNlu, Deterministic) {
  for (const char* s : {"I like ramen.", "Do you like coffee?", "Where are you from?"}) {
    EXPECT_EQ(understand(s, *kb_, *model_), understand(s, *kb_, *model_));
  }
}

TEST_F(MiniFoodNlu, FramePropertiesOverTrainingTexts) {
  const auto examples = load_training_file(testing::minifood_dir() / "training.jsonl");
  NluModel strict = *model_;
  strict.thresholds.supertype = 0.9;
  for (const auto& ex : examples) {
    const auto f = understand(ex.text, *kb_, *model_);
    // A raised threshold may only turn a supertype into UNKNOWN.
    const auto g = understand(ex.text, *kb_, strict);
    if (g.supertype != kUnknown) EXPECT_EQ(g.supertype, f.supertype) << ex.text;
    // Slot classes of a typed frame match one of the type's signatures.
    if (f.type != kUnknown) {
      std::vector<std::string> classes;
      for (const auto& s : f.slots) classes.push_back(s.slot_class);
      EXPECT_TRUE(kb_->act_types.find_type(f.type)->accepts(classes)) << ex.text;
    }
    for (const auto& s : f.slots) {
      EXPECT_GE(f.supertype_score, 0.0);
      EXPECT_LE(f.supertype_score, 1.0);
      // Canonical values are fixed points of the lookup.
      if (const auto* e = kb_->dictionary.lookup(s.canonical)) {
        EXPECT_EQ(e->canonical, s.canonical);
      }
    }
  }
}

TEST_F(MiniFoodNlu, OrderIndexFollowsSurfaceOrder) {
  const std::vector<std::string> foods{"sushi", "ramen", "pizza", "tea", "coffee"};
  for (const auto& a : foods) {
    for (const auto& b : foods) {
      if (a == b) continue;
      const auto slots =
          extract_slots(tokenize("I had " + a + " and " + b + "."), kb_->dictionary, *model_);
      ASSERT_EQ(slots.size(), 2u);
      EXPECT_EQ(slots[0].canonical, a);
      EXPECT_EQ(slots[0].order_index, 1);
      EXPECT_EQ(slots[1].canonical, b);
      EXPECT_EQ(slots[1].order_index, 2);
    }
  }
}

TEST(PredictActs, FiveBestSkipsTypeInconsistentWithSlots) {
  const auto toks = tokenize("I like sushi");
  const auto feats = act_features(toks);
  const std::vector<std::string> sorted_feats = [&] {
    auto v = feats;
    std::sort(v.begin(), v.end());
    return v;
  }();
  NluModel model;
  model.thresholds = {0.2, 0.2};
  std::vector<std::vector<double>> type_w(sorted_feats.size(), {0.0, 0.0});
  std::vector<std::vector<double>> super_w(sorted_feats.size(), {0.0});
  for (std::size_t i = 0; i < sorted_feats.size(); ++i) {
    if (sorted_feats[i] == "bias") type_w[i] = {1.0, 0.0};
  }
  model.type_clf = LinearClassifier({"tell-like-place", "tell-like-food"}, sorted_feats, type_w);
  model.supertype_clf = LinearClassifier({"inform"}, sorted_feats, super_w);

  ActTypeDecl decls;
  decls.supertypes = {"inform"};
  decls.types["tell-like-place"] = {"tell-like-place", "inform", {{"place"}}};
  decls.types["tell-like-food"] = {"tell-like-food", "inform", {{"food-drink"}}};

  const std::vector<SlotFill> slots{{"food-drink", "sushi", "sushi", 1, 2, 3}};
  const auto ranked = model.type_clf.ranked(feats);
  ASSERT_EQ(ranked.front().label, "tell-like-place");
  const auto p = predict_acts(toks, slots, model, decls);
  EXPECT_EQ(p.type, "tell-like-food");
  EXPECT_NEAR(p.type_score, 1.0 / (1.0 + std::exp(1.0)), 1e-12);
  EXPECT_EQ(p.supertype, "inform");
  EXPECT_DOUBLE_EQ(p.supertype_score, 1.0);

  const std::vector<SlotFill> none;
  EXPECT_EQ(predict_acts(toks, none, model, decls).type, kUnknown);
}

TEST(PredictActs, UntrainedModelThrows) {
  const NluModel model;
  ActTypeDecl decls;
  EXPECT_THROW(predict_acts(tokenize("hi"), {}, model, decls), NluError);
}

TrainingExample example(std::string text, std::string super, std::string type,
                        std::vector<SlotSpan> spans = {}) {
  TrainingExample ex;
  ex.tokens = tokenize_all(text);
  ex.text = std::move(text);
  ex.supertype = std::move(super);
  ex.type = std::move(type);
  ex.slot_spans = std::move(spans);
  return ex;
}

TEST(TrainNlu, EmptyExamplesThrow) {
  EXPECT_THROW(train_nlu({}, TrainConfig{}), NluError);
}

TEST(TrainNlu, SingleClassPredictsWithCertainty) {
  const auto r = train_nlu({example("hello there", "greet", "greet-hello")}, TrainConfig{});
  const auto ranked = r.model.supertype_clf.ranked(act_features(tokenize("hello there")));
  ASSERT_EQ(ranked.size(), 1u);
  EXPECT_EQ(ranked[0].label, "greet");
  EXPECT_DOUBLE_EQ(ranked[0].probability, 1.0);
}

TEST(TrainNlu, MissingLabelIsNamed) {
  const auto kb = testing::load_coffee_kb();
  TrainConfig tc;
  tc.declarations = &kb.act_types;
  try {
    train_nlu({example("yes", "acknowledge", "say-yes")}, tc);
    FAIL() << "expected a coverage error";
  } catch (const NluError& e) {
    EXPECT_NE(std::string(e.what()).find("zero training examples"), std::string::npos);
  }
}

TEST(TrainNlu, MiniFoodTrainingAccuracy) {
  const auto kb = testing::load_minifood_kb();
  const auto examples = load_training_file(testing::minifood_dir() / "training.jsonl");
  EXPECT_GE(examples.size(), 150u);
  TrainConfig tc;
  tc.declarations = &kb.act_types;
  tc.dictionary = &kb.dictionary;
  const auto r = train_nlu(examples, tc);
  EXPECT_GE(r.report.supertype_accuracy, 0.95);
  EXPECT_EQ(r.model.to_json(), train_nlu(examples, tc).model.to_json());
}

TEST(TrainNlu, HeldOutF1ReproducibleWithSeed) {
  const auto kb = testing::load_minifood_kb();
  const auto examples = load_training_file(testing::minifood_dir() / "training.jsonl");
  auto run = [&] {
    const auto split = split_examples(examples, 0.2, 7);
    auto train = split.train;
    const auto extra = augment_examples(split.train, kb.dictionary, 4);
    train.insert(train.end(), extra.begin(), extra.end());
    TrainConfig tc;
    tc.params.seed = 7;
    tc.dictionary = &kb.dictionary;
    return evaluate(train_nlu(train, tc).model, kb, split.heldout).slot_f1;
  };
  EXPECT_EQ(std::round(run() * 1000.0), std::round(run() * 1000.0));
}

TEST(SplitExamples, StratifiedAndDeterministic) {
  const auto examples = load_training_file(testing::minifood_dir() / "training.jsonl");
  const auto a = split_examples(examples, 0.2, 3);
  const auto b = split_examples(examples, 0.2, 3);
  EXPECT_EQ(a.train.size() + a.heldout.size(), examples.size());
  ASSERT_EQ(a.heldout.size(), b.heldout.size());
  for (std::size_t i = 0; i < a.heldout.size(); ++i) EXPECT_EQ(a.heldout[i].text, b.heldout[i].text);
  std::map<std::string, int> total, held;
  for (const auto& e : examples) ++total[e.type];
  for (const auto& e : a.heldout) ++held[e.type];
  for (const auto& [type, n] : total) EXPECT_EQ(held[type], n / 5) << type;
}

Dictionary four_foods() {
  std::vector<DictEntry> entries;
  for (const char* n : {"sushi", "ramen", "udon", "tempura"}) {
    DictEntry e;
    e.canonical = n;
    e.slot_class = "food-drink";
    entries.push_back(e);
  }
  return Dictionary(entries);
}

TEST(Augment, CapBoundsVariants) {
  const auto ex = example("I like sushi .", "inform", "tell-like-food", {{"food-drink", 2, 3}});
  const auto out = augment_examples({ex}, four_foods(), 3);
  ASSERT_EQ(out.size(), 3u);
  for (const auto& v : out) {
    EXPECT_EQ(v.type, "tell-like-food");
    ASSERT_EQ(v.slot_spans.size(), 1u);
    EXPECT_NE(v.text, ex.text);
  }
}

TEST(Augment, NoSpansOrZeroCapGivesNothing) {
  EXPECT_TRUE(augment_examples({example("hello", "greet", "greet-hello")}, four_foods(), 3).empty());
  const auto ex = example("I like sushi .", "inform", "tell-like-food", {{"food-drink", 2, 3}});
  EXPECT_TRUE(augment_examples({ex}, four_foods(), 0).empty());
}

TEST(ModelFile, JsonRoundTrip) {
  const auto r = train_nlu({example("hello there", "greet", "greet-hello"),
                            example("bye now", "farewell", "say-goodbye")},
                           TrainConfig{});
  const auto again = NluModel::from_json(r.model.to_json());
  EXPECT_EQ(again.to_json(), r.model.to_json());
  EXPECT_EQ(again.version, NluModel::kFormatVersion);
}

}  // namespace
}  // namespace exchat
