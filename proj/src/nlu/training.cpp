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
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

#include "exchat/nlu.hpp"

namespace exchat {

namespace {

using nlohmann::json;

std::vector<std::string> iob_tags(const TrainingExample& ex) {
  std::vector<std::string> tags(ex.tokens.size(), "O");
  for (const auto& span : ex.slot_spans) {
    for (std::size_t i = span.start; i < span.end; ++i) {
      tags[i] = (i == span.start ? "B-" : "I-") + span.slot_class;
    }
  }
  return tags;
}

void check_example(const TrainingExample& ex, std::size_t index) {
  const auto where = "training example " + std::to_string(index + 1) + " ('" +
                     ex.text + "')";
  if (ex.tokens.empty()) throw NluError(where + " has no tokens");
  if (ex.supertype.empty() || ex.type.empty()) {
    throw NluError(where + " is missing a supertype or type");
  }
  std::vector<bool> used(ex.tokens.size(), false);
  for (const auto& s : ex.slot_spans) {
    if (s.start >= s.end || s.end > ex.tokens.size()) {
      throw NluError(where + " has a slot span outside the token range");
    }
    for (std::size_t i = s.start; i < s.end; ++i) {
      if (used[i]) throw NluError(where + " has overlapping slot spans");
      used[i] = true;
    }
  }
}

void check_coverage(const std::vector<TrainingExample>& examples,
                    const ActTypeDecl& decls) {
  std::set<std::string> supers;
  std::set<std::string> types;
  for (const auto& ex : examples) {
    if (!decls.has_supertype(ex.supertype)) {
      throw NluError("training label '" + ex.supertype +
                     "' is not a declared supertype");
    }
    const auto* t = decls.find_type(ex.type);
    if (t == nullptr) {
      throw NluError("training label '" + ex.type + "' is not a declared type");
    }
    supers.insert(ex.supertype);
    types.insert(ex.type);
  }
  for (const auto& s : decls.supertypes) {
    if (supers.count(s) == 0) {
      throw NluError("supertype '" + s + "' has zero training examples");
    }
  }
  for (const auto& [name, _] : decls.types) {
    if (types.count(name) == 0) {
      throw NluError("type '" + name + "' has zero training examples");
    }
  }
}

json classifier_json(const LinearClassifier& clf) {
  return json{{"labels", clf.labels()},
              {"features", clf.features()},
              {"weights", clf.weights()}};
}

LinearClassifier classifier_from_json(const json& j) {
  return LinearClassifier(j.at("labels").get<std::vector<std::string>>(),
                          j.at("features").get<std::vector<std::string>>(),
                          j.at("weights").get<std::vector<std::vector<double>>>());
}

constexpr std::string_view kModelFormat = "exchat-nlu-model";

}  // namespace

TrainResult train_nlu(const std::vector<TrainingExample>& examples,
                      const TrainConfig& config) {
  if (examples.empty()) throw NluError("no training examples");
  for (std::size_t i = 0; i < examples.size(); ++i) check_example(examples[i], i);
  if (config.declarations != nullptr) check_coverage(examples, *config.declarations);

  std::vector<std::vector<std::string>> act_x;
  std::vector<std::string> super_y;
  std::vector<std::string> type_y;
  std::vector<std::vector<std::string>> tok_x;
  std::vector<std::string> tok_y;
  for (const auto& ex : examples) {
    act_x.push_back(act_features(ex.tokens));
    super_y.push_back(ex.supertype);
    type_y.push_back(ex.type);
    const auto tags = iob_tags(ex);
    for (std::size_t i = 0; i < ex.tokens.size(); ++i) {
      tok_x.push_back(token_features(ex.tokens, i, config.dictionary));
      tok_y.push_back(tags[i]);
    }
  }

  TrainResult result;
  auto& model = result.model;
  model.thresholds = config.thresholds;
  model.supertype_clf = LinearClassifier::train(act_x, super_y, config.params);
  model.type_clf = LinearClassifier::train(act_x, type_y, config.params);
  model.slot_labeler = LinearClassifier::train(tok_x, tok_y, config.params);

  std::size_t super_ok = 0;
  std::size_t type_ok = 0;
  for (std::size_t n = 0; n < act_x.size(); ++n) {
    if (model.supertype_clf.ranked(act_x[n]).front().label == super_y[n]) ++super_ok;
    if (model.type_clf.ranked(act_x[n]).front().label == type_y[n]) ++type_ok;
  }
  std::size_t tok_ok = 0;
  for (std::size_t n = 0; n < tok_x.size(); ++n) {
    if (model.slot_labeler.ranked(tok_x[n]).front().label == tok_y[n]) ++tok_ok;
  }
  auto& r = result.report;
  r.examples = examples.size();
  r.supertype_accuracy = static_cast<double>(super_ok) / act_x.size();
  r.type_accuracy = static_cast<double>(type_ok) / act_x.size();
  r.slot_token_accuracy = static_cast<double>(tok_ok) / tok_x.size();
  return result;
}

std::vector<TrainingExample> augment_examples(
    const std::vector<TrainingExample>& examples, const Dictionary& dict,
    std::size_t cap) {
  std::vector<TrainingExample> out;
  if (cap == 0) return out;
  std::map<std::string, std::vector<const DictEntry*>> by_class;
  for (const auto& e : dict.entries()) by_class[e.slot_class].push_back(&e);

  for (std::size_t n = 0; n < examples.size(); ++n) {
    const auto& ex = examples[n];
    std::size_t emitted = 0;
    for (std::size_t s = 0; s < ex.slot_spans.size() && emitted < cap; ++s) {
      const auto& span = ex.slot_spans[s];
      const std::string original = join_lower(ex.tokens, span.start, span.end);
      std::vector<const DictEntry*> pool;
      for (const auto* e : by_class[span.slot_class]) {
        if (normalize_surface(e->canonical) != original &&
            dict.lookup(original, span.slot_class) != e) {
          pool.push_back(e);
        }
      }
      if (pool.empty()) continue;
      // Deterministic spread over the pool, offset per example.
      const std::size_t want = std::min(cap - emitted, pool.size());
      for (std::size_t k = 0; k < want; ++k) {
        const auto* repl = pool[(n + k * pool.size() / want) % pool.size()];
        const auto repl_tokens = tokenize_all(repl->canonical);
        TrainingExample v;
        v.supertype = ex.supertype;
        v.type = ex.type;
        v.tokens.assign(ex.tokens.begin(), ex.tokens.begin() + span.start);
        v.tokens.insert(v.tokens.end(), repl_tokens.begin(), repl_tokens.end());
        v.tokens.insert(v.tokens.end(), ex.tokens.begin() + span.end,
                        ex.tokens.end());
        for (std::size_t i = 0; i < v.tokens.size(); ++i) v.tokens[i].position = i;
        const auto delta = static_cast<std::ptrdiff_t>(repl_tokens.size()) -
                           static_cast<std::ptrdiff_t>(span.end - span.start);
        for (const auto& other : ex.slot_spans) {
          SlotSpan moved = other;
          if (other.start == span.start) {
            moved.end = other.start + repl_tokens.size();
          } else if (other.start > span.start) {
            moved.start = static_cast<std::size_t>(
                static_cast<std::ptrdiff_t>(other.start) + delta);
            moved.end = static_cast<std::size_t>(
                static_cast<std::ptrdiff_t>(other.end) + delta);
          }
          v.slot_spans.push_back(moved);
        }
        v.text = join_surface(v.tokens, 0, v.tokens.size());
        out.push_back(std::move(v));
        ++emitted;
      }
    }
  }
  return out;
}

DataSplit split_examples(const std::vector<TrainingExample>& examples,
                         double holdout, std::uint64_t seed) {
  std::map<std::string, std::vector<std::size_t>> by_type;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    by_type[examples[i].type].push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::vector<bool> held(examples.size(), false);
  for (auto& [_, idx] : by_type) {
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto k = static_cast<std::size_t>(static_cast<double>(idx.size()) * holdout);
    for (std::size_t j = 0; j < k; ++j) held[idx[j]] = true;
  }
  DataSplit out;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    (held[i] ? out.heldout : out.train).push_back(examples[i]);
  }
  return out;
}

EvalMetrics evaluate(const NluModel& model, const KnowledgeBase& kb,
                     const std::vector<TrainingExample>& examples) {
  EvalMetrics m;
  m.examples = examples.size();
  if (examples.empty()) return m;
  std::size_t super_ok = 0;
  std::size_t type_ok = 0;
  std::size_t gold_spans = 0;
  std::size_t pred_spans = 0;
  std::size_t hits = 0;
  for (const auto& ex : examples) {
    const auto slots = extract_slots(ex.tokens, kb.dictionary, model);
    const auto acts = predict_acts(ex.tokens, slots, model, kb.act_types);
    if (acts.supertype == ex.supertype) ++super_ok;
    if (acts.type == ex.type) ++type_ok;
    gold_spans += ex.slot_spans.size();
    pred_spans += slots.size();
    for (const auto& s : slots) {
      const bool found = std::any_of(
          ex.slot_spans.begin(), ex.slot_spans.end(), [&](const SlotSpan& g) {
            return g.slot_class == s.slot_class && g.start == s.begin &&
                   g.end == s.end;
          });
      if (found) ++hits;
    }
  }
  const auto n = static_cast<double>(examples.size());
  m.supertype_accuracy = super_ok / n;
  m.type_accuracy = type_ok / n;
  m.slot_precision = pred_spans == 0 ? 1.0 : static_cast<double>(hits) / pred_spans;
  m.slot_recall = gold_spans == 0 ? 1.0 : static_cast<double>(hits) / gold_spans;
  const double pr = m.slot_precision + m.slot_recall;
  m.slot_f1 = pr == 0.0 ? 0.0 : 2.0 * m.slot_precision * m.slot_recall / pr;
  return m;
}

std::vector<TrainingExample> parse_training_jsonl(std::string_view text) {
  std::vector<TrainingExample> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      TrainingExample ex;
      ex.text = j.at("text").get<std::string>();
      ex.supertype = j.at("supertype").get<std::string>();
      ex.type = j.at("type").get<std::string>();
      ex.tokens = tokenize_all(ex.text);
      if (j.contains("slots")) {
        for (const auto& s : j.at("slots")) {
          ex.slot_spans.push_back({s.at("class").get<std::string>(),
                                   s.at("start").get<std::size_t>(),
                                   s.at("end").get<std::size_t>()});
        }
      }
      out.push_back(std::move(ex));
    } catch (const json::exception& e) {
      throw NluError("training data line " + std::to_string(line_no) + ": " +
                     e.what());
    }
  }
  return out;
}

std::vector<TrainingExample> load_training_file(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NluError("cannot open training file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_training_jsonl(ss.str());
}

std::string NluModel::to_json() const {
  json j;
  j["format"] = kModelFormat;
  j["version"] = version;
  j["thresholds"] = {{"supertype", thresholds.supertype},
                     {"type", thresholds.type}};
  j["supertype_classifier"] = classifier_json(supertype_clf);
  j["type_classifier"] = classifier_json(type_clf);
  j["slot_labeler"] = classifier_json(slot_labeler);
  return j.dump(1);
}

NluModel NluModel::from_json(std::string_view text) {
  try {
    const auto j = json::parse(text);
    if (j.at("format").get<std::string>() != kModelFormat) {
      throw NluError("not a language understanding model");
    }
    NluModel m;
    m.version = j.at("version").get<int>();
    if (m.version != kFormatVersion) {
      throw NluError("unsupported model version " + std::to_string(m.version));
    }
    m.thresholds.supertype = j.at("thresholds").at("supertype").get<double>();
    m.thresholds.type = j.at("thresholds").at("type").get<double>();
    m.supertype_clf = classifier_from_json(j.at("supertype_classifier"));
    m.type_clf = classifier_from_json(j.at("type_classifier"));
    m.slot_labeler = classifier_from_json(j.at("slot_labeler"));
    return m;
  } catch (const json::exception& e) {
    throw NluError(std::string("malformed model: ") + e.what());
  }
}

void NluModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NluError("cannot write model file " + path.string());
  out << to_json() << '\n';
}

NluModel NluModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NluError("cannot open model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace exchat
