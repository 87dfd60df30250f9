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
#include <random>

#include "exchat/engine.hpp"
#include "exchat/retrieval.hpp"
#include "exchat/text.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace exchat {
namespace {

std::vector<std::string> terms(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& t : tokenize_all(text)) out.push_back(t.lower);
  return out;
}

std::vector<Document> docs_of(const std::vector<std::string>& texts) {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < texts.size(); ++i) docs.push_back({i, terms(texts[i])});
  return docs;
}

TEST(TfIdf, VocabularySize) {
  const auto index = TfIdfIndex::build(docs_of({"a b", "b c d", "e a"}));
  EXPECT_EQ(index.vocabulary_size(), 5u);
}

TEST(TfIdf, SingleDocumentIdfIsOne) {
  const auto index = TfIdfIndex::build(docs_of({"do you like ramen"}));
  for (const char* t : {"do", "you", "like", "ramen"}) EXPECT_DOUBLE_EQ(*index.idf(t), 1.0);
}

TEST(TfIdf, EmptyCorpusThrows) {
  EXPECT_THROW(TfIdfIndex::build(std::vector<Document>{}), std::invalid_argument);
}

TEST(TfIdf, IdentityQuery) {
  const auto index = TfIdfIndex::build(docs_of({"what is your name", "can you cook"}));
  const auto hit = index.most_similar(terms("can you cook"), 0.9);
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->id, 1u);
  EXPECT_NEAR(hit->similarity, 1.0, 1e-9);
}

TEST(TfIdf, DisjointQueryGivesNone) {
  const auto index = TfIdfIndex::build(docs_of({"what is your name", "can you cook"}));
  EXPECT_FALSE(index.most_similar(terms("pizza tonight"), 0.0));
}

TEST(TfIdf, UnitNormVectors) {
  const auto index = TfIdfIndex::build(docs_of({"a b b c", "c d", "a a a e"}));
  for (const auto& v : index.doc_vectors()) {
    double n = 0.0;
    for (const auto& e : v) n += e.weight * e.weight;
    EXPECT_NEAR(n, 1.0, 1e-12);
  }
}

TEST(TfIdf, MiniFoodRankingMatchesOracle) {
  const auto kb = testing::load_minifood_kb();
  std::vector<std::vector<std::string>> raw;
  for (const auto& ex : kb.responses.example_responses) raw.push_back(terms(ex.example_utterance));
  ASSERT_EQ(raw.size(), 5u);
  const auto index = build_example_index(kb);
  ASSERT_TRUE(index);
  const testing::BruteForceTfIdf oracle(raw);
  const auto query = terms("do you like spicy ramen");
  const auto sims = index->similarities(query);
  std::vector<std::size_t> got(sims.size()), want(sims.size());
  for (std::size_t i = 0; i < sims.size(); ++i) {
    EXPECT_NEAR(sims[i].similarity, oracle.cosine(query, i), 1e-9);
    got[i] = want[i] = i;
  }
  std::stable_sort(got.begin(), got.end(),
                   [&](auto a, auto b) { return sims[a].similarity > sims[b].similarity; });
  std::stable_sort(want.begin(), want.end(), [&](auto a, auto b) {
    return oracle.cosine(query, a) > oracle.cosine(query, b);
  });
  EXPECT_EQ(got, want);
  EXPECT_EQ(got.front(), 0u);  // "do you like spicy food"
}

std::vector<std::vector<std::string>> random_corpus(std::mt19937_64& rng, std::size_t n) {
  static const std::vector<std::string> vocab{
      "do", "you", "like", "ramen", "sushi", "coffee", "tea", "what", "is", "your",
      "name", "where", "are", "from", "can", "cook", "eat", "drink", "often", "?"};
  std::uniform_int_distribution<std::size_t> len(1, 7);
  std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1);
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> d;
    for (std::size_t k = len(rng); k > 0; --k) d.push_back(vocab[word(rng)]);
    out.push_back(d);
  }
  return out;
}

TEST(TfIdf, RandomQueriesMatchOracle) {
  std::mt19937_64 rng(11);
  const auto corpus = random_corpus(rng, 20);
  std::vector<Document> docs;
  for (std::size_t i = 0; i < corpus.size(); ++i) docs.push_back({i, corpus[i]});
  const auto index = TfIdfIndex::build(docs);
  const testing::BruteForceTfIdf oracle(corpus);
  for (const auto& q : random_corpus(rng, 100)) {
    const auto want = oracle.best(q, 0.0);
    const auto got = index.most_similar(q, 0.0);
    ASSERT_EQ(bool(want), bool(got));
    if (!want) continue;
    EXPECT_NEAR(got->similarity, want->second, 1e-9);
    // Near-ties may resolve differently under rounding; the score must agree.
    if (got->id != want->first) {
      EXPECT_NEAR(oracle.cosine(q, got->id), want->second, 1e-9);
    }
  }
}

TEST(TfIdf, IdentitySymmetry) {
  std::mt19937_64 rng(5);
  for (const auto& d : random_corpus(rng, 50)) {
    const auto index = TfIdfIndex::build(std::vector<Document>{{0, d}});
    const auto hit = index.most_similar(d, 0.0);
    ASSERT_TRUE(hit);
    EXPECT_NEAR(hit->similarity, 1.0, 1e-9);
  }
}

TEST(TfIdf, ThresholdMonotonicity) {
  std::mt19937_64 rng(9);
  const auto corpus = random_corpus(rng, 20);
  std::vector<Document> docs;
  for (std::size_t i = 0; i < corpus.size(); ++i) docs.push_back({i, corpus[i]});
  const auto index = TfIdfIndex::build(docs);
  for (const auto& q : random_corpus(rng, 50)) {
    const auto low = index.most_similar(q, 0.2);
    for (double t : {0.3, 0.5, 0.7, 0.9}) {
      const auto high = index.most_similar(q, t);
      if (high) {
        ASSERT_TRUE(low);
        EXPECT_EQ(high->id, low->id);
      }
    }
  }
}

TEST(TfIdf, PermutationInvariance) {
  std::mt19937_64 rng(13);
  const auto corpus = random_corpus(rng, 20);
  std::vector<Document> docs;
  for (std::size_t i = 0; i < corpus.size(); ++i) docs.push_back({i, corpus[i]});
  auto shuffled = docs;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto a = TfIdfIndex::build(docs);
  const auto b = TfIdfIndex::build(shuffled);
  for (const auto& q : random_corpus(rng, 30)) {
    std::map<DocId, double> sa, sb;
    for (const auto& h : a.similarities(q)) sa[h.id] = h.similarity;
    for (const auto& h : b.similarities(q)) sb[h.id] = h.similarity;
    for (const auto& [id, s] : sa) EXPECT_NEAR(s, sb[id], 1e-12);
  }
}

}  // namespace
}  // namespace exchat
