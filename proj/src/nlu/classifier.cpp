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
#include <numeric>
#include <random>
#include <set>

#include "exchat/nlu.hpp"

namespace exchat {

namespace {

void softmax_inplace(std::vector<double>& z) {
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

}  // namespace

LinearClassifier::LinearClassifier(std::vector<std::string> labels,
                                   std::vector<std::string> features,
                                   std::vector<std::vector<double>> weights)
    : labels_(std::move(labels)),
      features_(std::move(features)),
      weights_(std::move(weights)) {
  if (weights_.size() != features_.size()) {
    throw NluError("classifier weight rows do not match feature count");
  }
  for (std::size_t f = 0; f < features_.size(); ++f) {
    if (weights_[f].size() != labels_.size()) {
      throw NluError("classifier weight row has wrong width");
    }
    feature_index_.emplace(features_[f], f);
  }
}

LinearClassifier LinearClassifier::train(
    const std::vector<std::vector<std::string>>& feature_sets,
    const std::vector<std::string>& targets, const Params& params) {
  if (feature_sets.empty() || feature_sets.size() != targets.size()) {
    throw NluError("classifier training needs one target per example");
  }
  const std::set<std::string> label_set(targets.begin(), targets.end());
  std::vector<std::string> labels(label_set.begin(), label_set.end());
  std::set<std::string> feature_set;
  for (const auto& fs : feature_sets) feature_set.insert(fs.begin(), fs.end());
  std::vector<std::string> features(feature_set.begin(), feature_set.end());

  std::map<std::string, std::size_t, std::less<>> findex;
  for (std::size_t i = 0; i < features.size(); ++i) findex.emplace(features[i], i);
  std::map<std::string, std::size_t, std::less<>> lindex;
  for (std::size_t i = 0; i < labels.size(); ++i) lindex.emplace(labels[i], i);

  // Pre-index examples so the inner loop is integer-only.
  std::vector<std::vector<std::size_t>> xs(feature_sets.size());
  std::vector<std::size_t> ys(targets.size());
  for (std::size_t n = 0; n < feature_sets.size(); ++n) {
    std::set<std::size_t> uniq;
    for (const auto& f : feature_sets[n]) uniq.insert(findex.at(f));
    xs[n].assign(uniq.begin(), uniq.end());
    ys[n] = lindex.at(targets[n]);
  }

  const std::size_t k = labels.size();
  std::vector<std::vector<double>> w(features.size(), std::vector<double>(k, 0.0));
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(params.seed);
  std::vector<double> z(k);
  const double decay = 1.0 - params.learning_rate * params.l2;

  if (k > 1) {
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t n : order) {
        std::fill(z.begin(), z.end(), 0.0);
        for (std::size_t f : xs[n]) {
          for (std::size_t c = 0; c < k; ++c) z[c] += w[f][c];
        }
        softmax_inplace(z);
        z[ys[n]] -= 1.0;  // gradient of the log loss wrt the logits
        for (std::size_t f : xs[n]) {
          for (std::size_t c = 0; c < k; ++c) {
            w[f][c] -= params.learning_rate * z[c];
          }
        }
      }
      for (auto& row : w) {
        for (double& v : row) v *= decay;
      }
    }
  }
  return LinearClassifier(std::move(labels), std::move(features), std::move(w));
}

std::vector<double> LinearClassifier::predict_proba(
    std::span<const std::string> features) const {
  if (labels_.empty()) throw NluError("classifier is not trained");
  std::vector<double> z(labels_.size(), 0.0);
  std::set<std::size_t> seen;
  for (const auto& f : features) {
    auto it = feature_index_.find(f);
    if (it == feature_index_.end() || !seen.insert(it->second).second) continue;
    const auto& row = weights_[it->second];
    for (std::size_t c = 0; c < z.size(); ++c) z[c] += row[c];
  }
  softmax_inplace(z);
  return z;
}

std::vector<LinearClassifier::Scored> LinearClassifier::ranked(
    std::span<const std::string> features) const {
  const auto p = predict_proba(features);
  std::vector<Scored> out;
  out.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out.push_back({labels_[i], p[i]});
  std::stable_sort(out.begin(), out.end(), [](const Scored& a, const Scored& b) {
    return a.probability > b.probability;
  });
  return out;
}

}  // namespace exchat
