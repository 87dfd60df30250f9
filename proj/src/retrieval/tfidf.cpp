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
#include <cmath>
#include <set>

#include "exchat/retrieval.hpp"

namespace exchat {

namespace {

void normalize(TfIdfIndex::SparseVector& v) {
  double norm = 0.0;
  for (const auto& e : v) norm += e.weight * e.weight;
  norm = std::sqrt(norm);
  if (norm == 0.0) return;
  for (auto& e : v) e.weight /= norm;
}

double dot(const TfIdfIndex::SparseVector& a, const TfIdfIndex::SparseVector& b) {
  double sum = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->dim < ib->dim) {
      ++ia;
    } else if (ib->dim < ia->dim) {
      ++ib;
    } else {
      sum += ia->weight * ib->weight;
      ++ia;
      ++ib;
    }
  }
  return sum;
}

}  // namespace

TfIdfIndex TfIdfIndex::build(std::span<const Document> docs) {
  if (docs.empty()) throw std::invalid_argument("cannot index zero documents");
  TfIdfIndex index;
  std::set<std::string> terms;
  for (const auto& d : docs) terms.insert(d.terms.begin(), d.terms.end());
  for (const auto& t : terms) index.vocabulary_.emplace(t, index.vocabulary_.size());

  std::vector<std::size_t> df(index.vocabulary_.size(), 0);
  for (const auto& d : docs) {
    std::set<std::size_t> seen;
    for (const auto& t : d.terms) seen.insert(index.vocabulary_.at(t));
    for (std::size_t dim : seen) ++df[dim];
  }
  const auto n = static_cast<double>(docs.size());
  index.idf_.resize(df.size());
  for (std::size_t i = 0; i < df.size(); ++i) {
    index.idf_[i] = std::log(n / static_cast<double>(df[i])) + 1.0;
  }
  for (const auto& d : docs) {
    index.doc_vectors_.push_back(index.vectorize(d.terms));
    index.doc_ids_.push_back(d.id);
  }
  return index;
}

TfIdfIndex::SparseVector TfIdfIndex::vectorize(
    std::span<const std::string> terms) const {
  std::map<std::size_t, double> counts;
  for (const auto& t : terms) {
    auto it = vocabulary_.find(t);
    if (it != vocabulary_.end()) counts[it->second] += 1.0;
  }
  SparseVector v;
  v.reserve(counts.size());
  for (const auto& [dim, tf] : counts) v.push_back({dim, tf * idf_[dim]});
  normalize(v);
  return v;
}

std::vector<RetrievalHit> TfIdfIndex::similarities(
    std::span<const std::string> query) const {
  const auto q = vectorize(query);
  std::vector<RetrievalHit> out;
  out.reserve(doc_vectors_.size());
  for (std::size_t i = 0; i < doc_vectors_.size(); ++i) {
    out.push_back({doc_ids_[i], q.empty() ? 0.0 : dot(q, doc_vectors_[i])});
  }
  return out;
}

std::optional<RetrievalHit> TfIdfIndex::most_similar(
    std::span<const std::string> query, double threshold) const {
  const auto sims = similarities(query);
  std::optional<RetrievalHit> best;
  for (const auto& hit : sims) {
    if (!best || hit.similarity > best->similarity ||
        (hit.similarity == best->similarity && hit.id < best->id)) {
      best = hit;
    }
  }
  if (!best || best->similarity <= 0.0 || best->similarity < threshold) {
    return std::nullopt;
  }
  return best;
}

std::optional<double> TfIdfIndex::idf(const std::string& term) const {
  auto it = vocabulary_.find(term);
  if (it == vocabulary_.end()) return std::nullopt;
  return idf_[it->second];
}

}  // namespace exchat
