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

#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "exchat/knowledge.hpp"

namespace exchat {

namespace {

namespace pt = boost::property_tree;

pt::ptree::path_type key(const std::string& s) {
  return pt::ptree::path_type(s, '\0');
}

void set_attr(pt::ptree& node, const std::string& name,
              const std::string& value) {
  node.put(pt::ptree::path_type("<xmlattr>\x1f" + name, '\x1f'), value);
}

pt::ptree& add_child(pt::ptree& parent, const std::string& name,
                     const std::string& text = {}) {
  return parent.add_child(key(name), pt::ptree(text));
}

pt::ptree action_tree(const ActionDescription& a) {
  pt::ptree node;
  if (a.label) set_attr(node, "label", *a.label);
  if (a.condition) add_child(node, "condition", to_string(*a.condition));
  for (const auto& u : a.utterances) add_child(node, "utterance", u.to_string());
  for (const auto& s : a.variable_settings) {
    if (s.value) {
      set_attr(add_child(node, "set", to_string(*s.value)), "var", s.variable);
    } else {
      set_attr(add_child(node, "clear"), "var", s.variable);
    }
  }
  if (a.expert_activation) {
    auto& act = add_child(node, "activate");
    set_attr(act, "expert", a.expert_activation->expert_id);
    set_attr(act, "state", a.expert_activation->initial_state.to_string());
    for (const auto& [k, v] : a.expert_activation->args) {
      set_attr(add_child(act, "arg", v), "name", k);
    }
  }
  return node;
}

std::string write(const pt::ptree& tree) {
  std::ostringstream out;
  pt::write_xml(out, tree,
                pt::xml_writer_make_settings<std::string>(' ', 2, "utf-8"));
  // Attributes are double-quoted, so apostrophes never need escaping.
  std::string xml = out.str();
  for (auto pos = xml.find("&apos;"); pos != std::string::npos; pos = xml.find("&apos;", pos)) {
    xml.replace(pos, 6, "'");
  }
  return xml;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out.push_back(' ');
    out += p;
  }
  return out;
}

pt::ptree dictionary_tree(std::span<const DictEntry> entries) {
  pt::ptree dict;
  for (const auto& e : entries) {
    auto& entry = add_child(dict, "entry");
    set_attr(entry, "class", e.slot_class);
    set_attr(entry, "name", e.canonical);
    for (const auto& alt : e.alternative_names) add_child(entry, "alt", alt);
    for (const auto& [k, v] : e.attributes) {
      set_attr(add_child(entry, "attr", v), "name", k);
    }
  }
  return dict;
}

}  // namespace

std::string serialize_action(const ActionDescription& action) {
  pt::ptree root;
  root.add_child(key("action"), action_tree(action));
  return write(root);
}

std::string serialize_declarations(const KnowledgeBase& kb) {
  pt::ptree acttypes;
  for (const auto& d : kb.slot_classes) {
    set_attr(add_child(acttypes, "slotclass", d.description), "name", d.name);
  }
  for (const auto& st : kb.act_types.supertypes) {
    set_attr(add_child(acttypes, "supertype"), "name", st);
  }
  for (const auto& [name, t] : kb.act_types.types) {
    auto& node = add_child(acttypes, "type");
    set_attr(node, "name", name);
    set_attr(node, "supertype", t.supertype);
    for (const auto& sig : t.signatures) add_child(node, "slots", join(sig));
  }
  pt::ptree root;
  root.add_child(key("acttypes"), acttypes);
  return write(root);
}

std::string serialize_knowledge(const KnowledgeBase& kb) {
  pt::ptree knowledge;
  knowledge.add_child(key("dictionary"),
                      dictionary_tree(kb.dictionary.entries()));

  pt::ptree responses;
  const auto& rk = kb.responses;
  for (const auto& [type, actions] : rk.response_pairs) {
    auto& pair = add_child(responses, "pair");
    set_attr(pair, "type", type);
    for (const auto& a : actions) pair.add_child(key("action"), action_tree(a));
  }
  for (const auto& [st, actions] : rk.default_responses) {
    auto& def = add_child(responses, "default");
    set_attr(def, "supertype", st);
    for (const auto& a : actions) def.add_child(key("action"), action_tree(a));
  }
  for (const auto& ex : rk.example_responses) {
    auto& node = add_child(responses, "example");
    set_attr(node, "utterance", ex.example_utterance);
    node.add_child(key("action"), action_tree(ex.action));
  }
  for (const auto& rel : rk.related_responses) {
    auto& node = add_child(responses, "related");
    set_attr(node, "topic", rel.topic_word);
    node.add_child(key("action"), action_tree(rel.action));
  }
  for (const auto& a : rk.non_responses) {
    add_child(responses, "nonresponse").add_child(key("action"), action_tree(a));
  }
  knowledge.add_child(key("responses"), responses);

  for (const auto& [id, net] : kb.networks) {
    pt::ptree node;
    set_attr(node, "id", id);
    for (const auto& st : net.states()) {
      auto& state = add_child(node, "state");
      set_attr(state, "id", st.id);
      for (const auto& a : st.actions) {
        state.add_child(key("action"), action_tree(a));
      }
      for (const auto& t : st.transitions) {
        auto& tr = add_child(state, "transition");
        set_attr(tr, "to", t.destination);
        for (const auto& c : t.conditions) {
          if (const auto* s = std::get_if<SupertypeIs>(&c)) {
            add_child(tr, "supertype", s->name);
          } else if (const auto* ty = std::get_if<TypeIs>(&c)) {
            add_child(tr, "type", ty->name);
          } else {
            add_child(tr, "call", to_string(std::get<FunctionCall>(c)));
          }
        }
      }
    }
    knowledge.add_child(key("network"), node);
  }

  pt::ptree topics;
  for (const auto& t : kb.session_topics) {
    auto& node = add_child(topics, "topic");
    set_attr(node, "name", t.name);
    if (!t.network.empty()) set_attr(node, "network", t.network);
    add_child(node, "opening").add_child(key("action"), action_tree(t.opening));
    for (const auto& s : t.subnetwork_entries) {
      set_attr(add_child(node, "subnetwork"), "state", s);
    }
  }
  knowledge.add_child(key("topics"), topics);

  pt::ptree root;
  root.add_child(key("knowledge"), knowledge);
  return write(root);
}

std::string dictionary_to_xml(std::span<const DictEntry> entries) {
  pt::ptree root;
  root.add_child(key("dictionary"), dictionary_tree(entries));
  return write(root);
}

}  // namespace exchat
