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
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "exchat/knowledge.hpp"
#include "exchat/text.hpp"

namespace exchat {

inline constexpr std::string_view kUnknown = "UNKNOWN";

struct SlotFill {
  std::string slot_class;
  std::string surface;
  std::string canonical;
  int order_index = 1;  // 1-based among fills of the same class
  std::size_t begin = 0;  // token span [begin, end)
  std::size_t end = 0;

  // Name of the variable this fill is stored in, e.g. "food-drink1".
  std::string variable() const {
    return slot_class + std::to_string(order_index);
  }

  bool operator==(const SlotFill&) const = default;
};

struct SemanticFrame {
  std::string text;
  std::string supertype{kUnknown};
  double supertype_score = 0.0;
  std::string type{kUnknown};
  double type_score = 0.0;
  std::vector<SlotFill> slots;

  static SemanticFrame unknown(std::string text = {});

  bool operator==(const SemanticFrame&) const = default;
};

struct SlotSpan {
  std::string slot_class;
  std::size_t start = 0;  // token index, inclusive
  std::size_t end = 0;    // exclusive

  bool operator==(const SlotSpan&) const = default;
};

struct TrainingExample {
  std::string text;
  std::vector<Token> tokens;  // tokenize_all(text) unless produced by augmentation
  std::string supertype;
  std::string type;
  std::vector<SlotSpan> slot_spans;
};

class NluError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Multinomial logistic regression over sparse binary features.
class LinearClassifier {
 public:
  struct Params {
    double learning_rate = 0.1;
    int epochs = 300;
    double l2 = 1e-4;
    std::uint64_t seed = 1;
  };

  struct Scored {
    std::string label;
    double probability;
  };

  LinearClassifier() = default;
  LinearClassifier(std::vector<std::string> labels,
                   std::vector<std::string> features,
                   std::vector<std::vector<double>> weights);

  static LinearClassifier train(
      const std::vector<std::vector<std::string>>& feature_sets,
      const std::vector<std::string>& targets, const Params& params);

  // Softmax over labels; unseen features are ignored.
  std::vector<double> predict_proba(std::span<const std::string> features) const;

  // Labels sorted by probability, highest first; ties keep label order.
  std::vector<Scored> ranked(std::span<const std::string> features) const;

  bool empty() const { return labels_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::string>& features() const { return features_; }
  const std::vector<std::vector<double>>& weights() const { return weights_; }

 private:
  std::vector<std::string> labels_;
  std::vector<std::string> features_;  // sorted
  std::vector<std::vector<double>> weights_;  // [feature][label]
  std::map<std::string, std::size_t, std::less<>> feature_index_;
};

struct Thresholds {
  double supertype = 0.5;
  double type = 0.5;
};

struct NluModel {
  static constexpr int kFormatVersion = 1;

  int version = kFormatVersion;
  Thresholds thresholds;
  LinearClassifier slot_labeler;  // labels: "O", "B-<class>", "I-<class>"
  LinearClassifier supertype_clf;
  LinearClassifier type_clf;

  bool trained() const {
    return !supertype_clf.empty() && !type_clf.empty();
  }

  std::string to_json() const;
  static NluModel from_json(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static NluModel load(const std::filesystem::path& path);
};

struct TrainConfig {
  LinearClassifier::Params params;
  Thresholds thresholds;
  // When set, every declared supertype and type must have examples and
  // example labels must be declared.
  const ActTypeDecl* declarations = nullptr;
  const Dictionary* dictionary = nullptr;  // drives the dictionary-hit feature
};

struct TrainReport {
  double supertype_accuracy = 0.0;
  double type_accuracy = 0.0;
  double slot_token_accuracy = 0.0;
  std::size_t examples = 0;
};

struct TrainResult {
  NluModel model;
  TrainReport report;
};

struct ActPrediction {
  std::string supertype{kUnknown};
  double supertype_score = 0.0;
  std::string type{kUnknown};
  double type_score = 0.0;
};

struct EvalMetrics {
  double supertype_accuracy = 0.0;
  double type_accuracy = 0.0;
  double slot_precision = 0.0;
  double slot_recall = 0.0;
  double slot_f1 = 0.0;
  std::size_t examples = 0;
};

// Greedy longest match of token n-grams (up to `max_ngram`) against the
// dictionary. Returns spans with canonical values and order indices.
std::vector<SlotFill> match_dictionary(const std::vector<Token>& tokens,
                                       const Dictionary& dict,
                                       std::size_t max_ngram = 4);

// Dictionary match first; the IOB labeler only runs when it finds nothing.
std::vector<SlotFill> extract_slots(const std::vector<Token>& tokens,
                                    const Dictionary& dict,
                                    const NluModel& model);

// Runs only the statistical labeler.
std::vector<SlotFill> label_slots(const std::vector<Token>& tokens,
                                  const Dictionary& dict,
                                  const NluModel& model);

ActPrediction predict_acts(const std::vector<Token>& tokens,
                           std::span<const SlotFill> slots,
                           const NluModel& model, const ActTypeDecl& decls);

SemanticFrame understand(std::string_view text, const KnowledgeBase& kb,
                         const NluModel& model);

TrainResult train_nlu(const std::vector<TrainingExample>& examples,
                      const TrainConfig& config);

// Adds variants of each example with slot spans replaced by other entries
// of the same slot class, at most `cap` per example.
std::vector<TrainingExample> augment_examples(
    const std::vector<TrainingExample>& examples, const Dictionary& dict,
    std::size_t cap = 4);

// Stratified by type: for each type, floor(n * holdout) shuffled examples go
// to the held-out part. Deterministic for a given seed.
struct DataSplit {
  std::vector<TrainingExample> train;
  std::vector<TrainingExample> heldout;
};
DataSplit split_examples(const std::vector<TrainingExample>& examples,
                         double holdout, std::uint64_t seed);

EvalMetrics evaluate(const NluModel& model, const KnowledgeBase& kb,
                     const std::vector<TrainingExample>& examples);

// Feature extraction shared by training and prediction.
std::vector<std::string> act_features(const std::vector<Token>& tokens);
std::vector<std::string> token_features(const std::vector<Token>& tokens,
                                        std::size_t i, const Dictionary* dict);

// Training data: one JSON object per line,
// {"text", "supertype", "type", "slots": [{"class", "start", "end"}]}.
std::vector<TrainingExample> parse_training_jsonl(std::string_view text);
std::vector<TrainingExample> load_training_file(
    const std::filesystem::path& path);

// Assigns order_index left to right per slot class.
void assign_order_indices(std::vector<SlotFill>& fills);

}  // namespace exchat
