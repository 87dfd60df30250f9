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

#include "exchat/knowledge.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "exchat/text.hpp"

namespace exchat {

namespace {

std::string format_error(const std::string& file, int line,
                         const std::string& path, const std::string& message) {
  std::string out = file;
  if (line > 0) out += ":" + std::to_string(line);
  if (!path.empty()) out += ": " + path;
  return out + ": " + message;
}

}  // namespace

KnowledgeError::KnowledgeError(std::string file, int line, std::string path,
                               const std::string& message)
    : std::runtime_error(format_error(file, line, path, message)),
      file_(std::move(file)),
      line_(line),
      path_(std::move(path)) {}

bool TypeDecl::accepts(std::vector<std::string> slot_classes) const {
  std::sort(slot_classes.begin(), slot_classes.end());
  if (signatures.empty()) return slot_classes.empty();
  return std::find(signatures.begin(), signatures.end(), slot_classes) !=
         signatures.end();
}

bool ActTypeDecl::has_supertype(std::string_view name) const {
  return std::find(supertypes.begin(), supertypes.end(), name) !=
         supertypes.end();
}

bool ActTypeDecl::has_type(std::string_view name) const {
  return find_type(name) != nullptr;
}

const TypeDecl* ActTypeDecl::find_type(std::string_view name) const {
  auto it = types.find(std::string(name));
  return it == types.end() ? nullptr : &it->second;
}

Dictionary::Dictionary(std::vector<DictEntry> entries) {
  for (auto& e : entries) add(std::move(e));
}

void Dictionary::add(DictEntry entry) {
  if (trim(entry.canonical).empty()) {
    throw KnowledgeError(entry.loc.file, 0, entry.loc.path,
                         "dictionary entry with empty canonical name");
  }
  const std::size_t idx = entries_.size();
  std::vector<std::string> keys;
  keys.push_back(normalize_surface(entry.canonical));
  for (const auto& alt : entry.alternative_names) {
    keys.push_back(normalize_surface(alt));
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  for (const auto& key : keys) {
    auto it = index_.find(key);
    if (it == index_.end()) continue;
    for (std::size_t other : it->second) {
      if (entries_[other].slot_class == entry.slot_class) {
        throw KnowledgeError(
            entry.loc.file, 0, entry.loc.path,
            "name '" + key + "' of '" + entry.canonical +
                "' is already claimed by '" + entries_[other].canonical +
                "' in slot class " + entry.slot_class);
      }
    }
  }
  for (const auto& key : keys) {
    index_[key].push_back(idx);
    std::size_t n = 0;
    for (auto& tok : tokenize_all(key)) {
      words_.insert(std::move(tok.lower));
      ++n;
    }
    max_tokens_ = std::max(max_tokens_, n);
  }
  entries_.push_back(std::move(entry));
}

const DictEntry* Dictionary::lookup(std::string_view surface) const {
  auto it = index_.find(normalize_surface(surface));
  if (it == index_.end()) return nullptr;
  return &entries_[it->second.front()];
}

const DictEntry* Dictionary::lookup(std::string_view surface,
                                    std::string_view slot_class) const {
  auto it = index_.find(normalize_surface(surface));
  if (it == index_.end()) return nullptr;
  for (std::size_t idx : it->second) {
    if (entries_[idx].slot_class == slot_class) return &entries_[idx];
  }
  return nullptr;
}

const DictEntry* dictionary_lookup(std::string_view surface,
                                   const Dictionary& dict) {
  return dict.lookup(surface);
}

Network::Network(std::string id, SourceLoc loc)
    : id_(std::move(id)), loc_(std::move(loc)) {}

const NetworkState* Network::find(std::string_view state_id) const {
  auto it = index_.find(state_id);
  return it == index_.end() ? nullptr : &states_[it->second];
}

bool Network::add_state(NetworkState state) {
  if (index_.count(state.id) != 0) return false;
  index_.emplace(state.id, states_.size());
  states_.push_back(std::move(state));
  return true;
}

bool ResponseKnowledge::empty() const {
  return response_pairs.empty() && default_responses.empty() &&
         example_responses.empty() && related_responses.empty() &&
         non_responses.empty();
}

bool KnowledgeBase::has_slot_class(std::string_view name) const {
  return std::any_of(slot_classes.begin(), slot_classes.end(),
                     [&](const SlotClassDecl& d) { return d.name == name; });
}

const Network* KnowledgeBase::find_network(std::string_view id) const {
  auto it = networks.find(std::string(id));
  return it == networks.end() ? nullptr : &it->second;
}

const SessionTopic* KnowledgeBase::find_topic(std::string_view name) const {
  for (const auto& t : session_topics) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

bool KnowledgeBase::is_slot_variable(std::string_view name) const {
  for (const auto& decl : slot_classes) {
    if (name.size() <= decl.name.size()) continue;
    if (name.substr(0, decl.name.size()) != decl.name) continue;
    const auto suffix = name.substr(decl.name.size());
    if (std::all_of(suffix.begin(), suffix.end(), [](char c) {
          return std::isdigit(static_cast<unsigned char>(c)) != 0;
        })) {
      return true;
    }
  }
  return false;
}

namespace {

std::vector<std::string> parse_csv_row(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::vector<std::string> split_nonempty(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(sep, start);
    if (end == std::string_view::npos) end = s.size();
    auto part = trim(s.substr(start, end - start));
    if (!part.empty()) out.emplace_back(part);
    start = end + 1;
  }
  return out;
}

}  // namespace

std::vector<DictEntry> parse_dictionary_csv(std::string_view csv) {
  std::vector<DictEntry> entries;
  std::istringstream in{std::string(csv)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = parse_csv_row(line);
    if (line_no == 1 && to_lower_ascii(trim(fields[0])) == "class") continue;
    if (fields.size() < 2 || trim(fields[1]).empty()) {
      throw KnowledgeError("<csv>", line_no, "",
                           "expected at least class and name columns");
    }
    DictEntry e;
    e.slot_class = std::string(trim(fields[0]));
    e.canonical = std::string(trim(fields[1]));
    if (fields.size() > 2) e.alternative_names = split_nonempty(fields[2], ';');
    if (fields.size() > 3) {
      for (const auto& kv : split_nonempty(fields[3], ';')) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
          throw KnowledgeError("<csv>", line_no, "",
                               "attribute '" + kv + "' is not key=value");
        }
        e.attributes[std::string(trim(std::string_view(kv).substr(0, eq)))] =
            std::string(trim(std::string_view(kv).substr(eq + 1)));
      }
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace exchat
