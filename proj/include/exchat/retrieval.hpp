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
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace exchat {

using DocId = std::size_t;

struct Document {
  DocId id;
  std::vector<std::string> terms;  // tokenized (lowercased) text
};

struct RetrievalHit {
  DocId id;
  double similarity;
};

// tf-idf index with raw term counts, idf(t) = ln(N / df(t)) + 1 and
// L2-normalized document vectors.
class TfIdfIndex {
 public:
  struct Entry {
    std::size_t dim;
    double weight;
  };
  using SparseVector = std::vector<Entry>;  // sorted by dim

  // Throws std::invalid_argument on an empty document list.
  static TfIdfIndex build(std::span<const Document> docs);

  // Argmax cosine similarity; none when below `threshold` or when the query
  // shares no terms with the index. Ties go to the lowest doc id.
  std::optional<RetrievalHit> most_similar(std::span<const std::string> query,
                                           double threshold) const;

  // Cosine similarity of the query against every document, in index order.
  std::vector<RetrievalHit> similarities(std::span<const std::string> query) const;

  std::size_t vocabulary_size() const { return vocabulary_.size(); }
  std::size_t size() const { return doc_ids_.size(); }
  std::optional<double> idf(const std::string& term) const;
  const std::vector<SparseVector>& doc_vectors() const { return doc_vectors_; }
  const std::vector<DocId>& doc_ids() const { return doc_ids_; }

 private:
  SparseVector vectorize(std::span<const std::string> terms) const;

  std::map<std::string, std::size_t, std::less<>> vocabulary_;
  std::vector<double> idf_;
  std::vector<SparseVector> doc_vectors_;
  std::vector<DocId> doc_ids_;
};

}  // namespace exchat
