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
#include <map>
#include <set>

#include "exchat/nlu.hpp"

namespace exchat {

namespace {

std::string word_at(const std::vector<Token>& tokens, std::ptrdiff_t i) {
  if (i < 0) return "<s>";
  if (static_cast<std::size_t>(i) >= tokens.size()) return "</s>";
  return tokens[static_cast<std::size_t>(i)].lower;
}

}  // namespace

SemanticFrame SemanticFrame::unknown(std::string text) {
  SemanticFrame f;
  f.text = std::move(text);
  return f;
}

std::vector<std::string> act_features(const std::vector<Token>& tokens) {
  std::vector<std::string> out{"bias"};
  bool question = false;
  for (const auto& t : tokens) {
    out.push_back("w=" + t.lower);
    if (t.lower == "?") question = true;
  }
  if (question) out.emplace_back("question-mark");
  return out;
}

std::vector<std::string> token_features(const std::vector<Token>& tokens,
                                        std::size_t i, const Dictionary* dict) {
  const auto pos = static_cast<std::ptrdiff_t>(i);
  const auto& tok = tokens[i];
  const std::string prev = word_at(tokens, pos - 1);
  const std::string next = word_at(tokens, pos + 1);
  std::vector<std::string> out{
      "bias",
      "w=" + tok.lower,
      "w-1=" + prev,
      "w+1=" + next,
      "w-2=" + word_at(tokens, pos - 2),
      "w+2=" + word_at(tokens, pos + 2),
      "b-=" + prev + "|" + tok.lower,
      "b+=" + tok.lower + "|" + next,
  };
  if (tok.lower.size() > 3) {
    out.push_back("suf3=" + tok.lower.substr(tok.lower.size() - 3));
  }
  if (!tok.surface.empty() &&
      std::isupper(static_cast<unsigned char>(tok.surface.front())) != 0 &&
      i > 0) {
    out.emplace_back("cap");
  }
  if (dict != nullptr && dict->contains_word(tok.lower)) {
    out.emplace_back("dict-hit");
  }
  return out;
}

void assign_order_indices(std::vector<SlotFill>& fills) {
  std::sort(fills.begin(), fills.end(),
            [](const SlotFill& a, const SlotFill& b) { return a.begin < b.begin; });
  std::map<std::string, int> counts;
  for (auto& f : fills) f.order_index = ++counts[f.slot_class];
}

std::vector<SlotFill> match_dictionary(const std::vector<Token>& tokens,
                                       const Dictionary& dict,
                                       std::size_t max_ngram) {
  std::vector<SlotFill> fills;
  std::size_t i = 0;
  while (i < tokens.size()) {
    bool matched = false;
    const std::size_t longest = std::min(max_ngram, tokens.size() - i);
    for (std::size_t n = longest; n >= 1; --n) {
      const auto* entry = dict.lookup(join_lower(tokens, i, i + n));
      if (entry == nullptr) continue;
      SlotFill f;
      f.slot_class = entry->slot_class;
      f.surface = join_surface(tokens, i, i + n);
      f.canonical = entry->canonical;
      f.begin = i;
      f.end = i + n;
      fills.push_back(std::move(f));
      i += n;
      matched = true;
      break;
    }
    if (!matched) ++i;
  }
  assign_order_indices(fills);
  return fills;
}

std::vector<SlotFill> label_slots(const std::vector<Token>& tokens,
                                  const Dictionary& dict,
                                  const NluModel& model) {
  std::vector<SlotFill> fills;
  if (tokens.empty() || model.slot_labeler.empty()) return fills;
  std::vector<std::string> tags;
  tags.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto feats = token_features(tokens, i, &dict);
    tags.push_back(model.slot_labeler.ranked(feats).front().label);
  }
  // Repair invalid sequences: an I- tag not continuing the same class opens
  // a new span.
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i].rfind("I-", 0) != 0) continue;
    const std::string cls = tags[i].substr(2);
    const bool continues =
        i > 0 && (tags[i - 1] == "B-" + cls || tags[i - 1] == "I-" + cls);
    if (!continues) tags[i] = "B-" + cls;
  }
  for (std::size_t i = 0; i < tags.size();) {
    if (tags[i].rfind("B-", 0) != 0) {
      ++i;
      continue;
    }
    const std::string cls = tags[i].substr(2);
    std::size_t j = i + 1;
    while (j < tags.size() && tags[j] == "I-" + cls) ++j;
    SlotFill f;
    f.slot_class = cls;
    f.surface = join_surface(tokens, i, j);
    const auto* entry = dict.lookup(f.surface, cls);
    f.canonical = entry != nullptr ? entry->canonical : f.surface;
    f.begin = i;
    f.end = j;
    fills.push_back(std::move(f));
    i = j;
  }
  assign_order_indices(fills);
  return fills;
}

std::vector<SlotFill> extract_slots(const std::vector<Token>& tokens,
                                    const Dictionary& dict,
                                    const NluModel& model) {
  auto fills = match_dictionary(tokens, dict);
  if (!fills.empty()) return fills;
  return label_slots(tokens, dict, model);
}

ActPrediction predict_acts(const std::vector<Token>& tokens,
                           std::span<const SlotFill> slots,
                           const NluModel& model, const ActTypeDecl& decls) {
  if (!model.trained()) throw NluError("language understanding model is missing");
  const auto feats = act_features(tokens);
  ActPrediction out;

  const auto super = model.supertype_clf.ranked(feats);
  if (super.front().probability >= model.thresholds.supertype) {
    out.supertype = super.front().label;
  }
  out.supertype_score = super.front().probability;

  std::vector<std::string> classes;
  for (const auto& s : slots) classes.push_back(s.slot_class);
  const auto types = model.type_clf.ranked(feats);
  out.type_score = types.front().probability;
  const std::size_t nbest = std::min<std::size_t>(5, types.size());
  for (std::size_t i = 0; i < nbest; ++i) {
    if (types[i].probability < model.thresholds.type) break;
    const auto* decl = decls.find_type(types[i].label);
    if (decl == nullptr || !decl->accepts(classes)) continue;
    out.type = types[i].label;
    out.type_score = types[i].probability;
    break;
  }
  return out;
}

SemanticFrame understand(std::string_view text, const KnowledgeBase& kb,
                         const NluModel& model) {
  const auto tokens = tokenize(text);
  SemanticFrame frame;
  frame.text = std::string(trim(text));
  frame.slots = extract_slots(tokens, kb.dictionary, model);
  const auto acts = predict_acts(tokens, frame.slots, model, kb.act_types);
  frame.supertype = acts.supertype;
  frame.supertype_score = acts.supertype_score;
  frame.type = acts.type;
  frame.type_score = acts.type_score;
  return frame;
}

}  // namespace exchat
