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

// XML knowledge reader. The schema is documented in docs/knowledge-format.md.

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "exchat/knowledge.hpp"
#include "exchat/text.hpp"

namespace exchat {

namespace {

namespace pt = boost::property_tree;

constexpr std::string_view kAttrKey = "<xmlattr>";

class Reader {
 public:
  explicit Reader(std::string file) : file_(std::move(file)) {}

  [[noreturn]] void fail(const std::string& path,
                         const std::string& message) const {
    throw KnowledgeError(file_, 0, path, message);
  }

  SourceLoc loc(const std::string& path) const { return {file_, path}; }

  std::optional<std::string> attr(const pt::ptree& node,
                                  std::string_view name) const {
    auto attrs = node.get_child_optional(pt::ptree::path_type(
        std::string(kAttrKey), '\0'));
    if (!attrs) return std::nullopt;
    auto v = attrs->get_child_optional(
        pt::ptree::path_type(std::string(name), '\0'));
    if (!v) return std::nullopt;
    return v->data();
  }

  std::string required_attr(const pt::ptree& node, std::string_view name,
                            const std::string& path) const {
    auto v = attr(node, name);
    if (!v || trim(*v).empty()) {
      fail(path, "missing attribute '" + std::string(name) + "'");
    }
    return std::string(trim(*v));
  }

  std::string text(const pt::ptree& node) const {
    return std::string(trim(node.data()));
  }

  // Rejects attributes outside `allowed`.
  void check_attrs(const pt::ptree& node, std::initializer_list<std::string_view> allowed,
                   const std::string& path) const {
    auto attrs = node.get_child_optional(
        pt::ptree::path_type(std::string(kAttrKey), '\0'));
    if (!attrs) return;
    for (const auto& [name, _] : *attrs) {
      if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
        fail(path, "unknown attribute '" + name + "'");
      }
    }
  }

  template <typename Fn>
  void children(const pt::ptree& node, const std::string& path, Fn&& fn) const {
    for (const auto& [name, child] : node) {
      if (name == kAttrKey) continue;
      fn(name, child);
    }
    (void)path;
  }

  const std::string& file() const { return file_; }

 private:
  std::string file_;
};

std::string indexed(const std::string& parent, std::string_view name,
                    std::size_t index) {
  std::string p = parent.empty() ? "" : parent + "/";
  return p + std::string(name) + "[" + std::to_string(index) + "]";
}

std::string keyed(const std::string& parent, std::string_view name,
                  std::string_view key) {
  std::string p = parent.empty() ? "" : parent + "/";
  return p + std::string(name) + "[" + std::string(key) + "]";
}

struct FileContext {
  const Reader& reader;
  std::set<std::string> labels;
};

UtteranceTemplate parse_template(const Reader& r, const std::string& text,
                                 const std::string& path) {
  try {
    return UtteranceTemplate::parse(text);
  } catch (const TemplateError& e) {
    r.fail(path, e.what());
  }
}

ActionDescription parse_action(FileContext& ctx, const pt::ptree& node,
                               const std::string& path) {
  const Reader& r = ctx.reader;
  r.check_attrs(node, {"label"}, path);
  ActionDescription a;
  a.loc = r.loc(path);
  if (auto label = r.attr(node, "label")) {
    a.label = std::string(trim(*label));
    if (!ctx.labels.insert(*a.label).second) {
      r.fail(path, "duplicate action label '" + *a.label + "'");
    }
  }
  std::size_t n_utt = 0;
  r.children(node, path, [&](const std::string& name, const pt::ptree& child) {
    if (name == "condition") {
      if (a.condition) r.fail(path, "more than one <condition>");
      try {
        a.condition = parse_call(r.text(child));
      } catch (const TemplateError& e) {
        r.fail(path + "/condition", e.what());
      }
    } else if (name == "utterance") {
      const auto upath = indexed(path, "utterance", ++n_utt);
      a.utterances.push_back(parse_template(r, r.text(child), upath));
    } else if (name == "set") {
      const auto spath = path + "/set";
      VariableSetting s;
      s.variable = r.required_attr(child, "var", spath);
      try {
        s.value = parse_expr(r.text(child));
      } catch (const TemplateError& e) {
        r.fail(spath, e.what());
      }
      a.variable_settings.push_back(std::move(s));
    } else if (name == "clear") {
      VariableSetting s;
      s.variable = r.required_attr(child, "var", path + "/clear");
      a.variable_settings.push_back(std::move(s));
    } else if (name == "activate") {
      const auto apath = path + "/activate";
      if (a.expert_activation) r.fail(path, "more than one <activate>");
      ExpertActivation act;
      act.expert_id = r.required_attr(child, "expert", apath);
      act.initial_state = parse_template(
          r, r.required_attr(child, "state", apath), apath);
      r.children(child, apath,
                 [&](const std::string& an, const pt::ptree& arg) {
                   if (an != "arg") r.fail(apath, "unexpected <" + an + ">");
                   act.args[r.required_attr(arg, "name", apath + "/arg")] =
                       r.text(arg);
                 });
      a.expert_activation = std::move(act);
    } else {
      r.fail(path, "unexpected <" + name + "> in <action>");
    }
  });
  return a;
}

// Reads the single <action> child of `node` (non-response, example, ...).
ActionDescription single_action(FileContext& ctx, const pt::ptree& node,
                                const std::string& path) {
  std::optional<ActionDescription> action;
  ctx.reader.children(node, path, [&](const std::string& name,
                                      const pt::ptree& child) {
    if (name != "action") ctx.reader.fail(path, "unexpected <" + name + ">");
    if (action) ctx.reader.fail(path, "expected exactly one <action>");
    action = parse_action(ctx, child, path + "/action");
  });
  if (!action) ctx.reader.fail(path, "missing <action>");
  return std::move(*action);
}

std::vector<ActionDescription> action_list(FileContext& ctx,
                                           const pt::ptree& node,
                                           const std::string& path) {
  std::vector<ActionDescription> out;
  ctx.reader.children(node, path, [&](const std::string& name,
                                      const pt::ptree& child) {
    if (name != "action") ctx.reader.fail(path, "unexpected <" + name + ">");
    out.push_back(parse_action(ctx, child, indexed(path, "action", out.size() + 1)));
  });
  return out;
}

void parse_dictionary(FileContext& ctx, const pt::ptree& node,
                      KnowledgeBase& kb) {
  const Reader& r = ctx.reader;
  std::size_t n = 0;
  r.children(node, "dictionary", [&](const std::string& name,
                                     const pt::ptree& child) {
    const auto path = indexed("dictionary", "entry", ++n);
    if (name != "entry") r.fail("dictionary", "unexpected <" + name + ">");
    r.check_attrs(child, {"class", "name"}, path);
    DictEntry e;
    e.slot_class = r.required_attr(child, "class", path);
    e.canonical = r.required_attr(child, "name", path);
    e.loc = r.loc(keyed("dictionary", "entry", e.canonical));
    r.children(child, path, [&](const std::string& cn, const pt::ptree& c) {
      if (cn == "alt") {
        auto alt = r.text(c);
        if (alt.empty()) r.fail(path, "empty <alt>");
        e.alternative_names.push_back(std::move(alt));
      } else if (cn == "attr") {
        e.attributes[r.required_attr(c, "name", path + "/attr")] = r.text(c);
      } else {
        r.fail(path, "unexpected <" + cn + "> in <entry>");
      }
    });
    kb.dictionary.add(std::move(e));
  });
}

void parse_responses(FileContext& ctx, const pt::ptree& node,
                     KnowledgeBase& kb) {
  const Reader& r = ctx.reader;
  auto& rk = kb.responses;
  std::map<std::string, std::size_t> counts;
  r.children(node, "responses", [&](const std::string& name,
                                    const pt::ptree& child) {
    const auto path = indexed("responses", name, ++counts[name]);
    if (name == "pair") {
      const auto type = r.required_attr(child, "type", path);
      auto actions = action_list(ctx, child, keyed("responses", "pair", type));
      auto& dst = rk.response_pairs[type];
      dst.insert(dst.end(), actions.begin(), actions.end());
    } else if (name == "default") {
      const auto st = r.required_attr(child, "supertype", path);
      auto actions =
          action_list(ctx, child, keyed("responses", "default", st));
      auto& dst = rk.default_responses[st];
      dst.insert(dst.end(), actions.begin(), actions.end());
    } else if (name == "example") {
      ExampleResponse ex;
      ex.example_utterance = r.required_attr(child, "utterance", path);
      ex.action = single_action(ctx, child, path);
      rk.example_responses.push_back(std::move(ex));
    } else if (name == "related") {
      RelatedResponse rel;
      rel.topic_word = r.required_attr(child, "topic", path);
      rel.action = single_action(ctx, child, path);
      rk.related_responses.push_back(std::move(rel));
    } else if (name == "nonresponse") {
      rk.non_responses.push_back(single_action(ctx, child, path));
    } else {
      r.fail("responses", "unexpected <" + name + ">");
    }
  });
}

void parse_network(FileContext& ctx, const pt::ptree& node,
                   KnowledgeBase& kb) {
  const Reader& r = ctx.reader;
  const auto id = r.required_attr(node, "id", "network");
  const auto npath = keyed("", "network", id);
  Network net(id, r.loc(npath));
  r.children(node, npath, [&](const std::string& name,
                              const pt::ptree& child) {
    if (name != "state") r.fail(npath, "unexpected <" + name + ">");
    NetworkState st;
    st.id = r.required_attr(child, "id", npath + "/state");
    const auto spath = keyed(npath, "state", st.id);
    st.loc = r.loc(spath);
    r.children(child, spath, [&](const std::string& cn, const pt::ptree& c) {
      if (cn == "action") {
        st.actions.push_back(
            parse_action(ctx, c, indexed(spath, "action", st.actions.size() + 1)));
      } else if (cn == "transition") {
        Transition t;
        const auto tpath = indexed(spath, "transition", st.transitions.size() + 1);
        t.destination = r.required_attr(c, "to", tpath);
        t.loc = r.loc(tpath);
        r.children(c, tpath, [&](const std::string& kn, const pt::ptree& k) {
          if (kn == "supertype") {
            t.conditions.emplace_back(SupertypeIs{r.text(k)});
          } else if (kn == "type") {
            t.conditions.emplace_back(TypeIs{r.text(k)});
          } else if (kn == "call") {
            try {
              t.conditions.emplace_back(parse_call(r.text(k)));
            } catch (const TemplateError& e) {
              r.fail(tpath, e.what());
            }
          } else {
            r.fail(tpath, "unexpected <" + kn + "> in <transition>");
          }
        });
        st.transitions.push_back(std::move(t));
      } else {
        r.fail(spath, "unexpected <" + cn + "> in <state>");
      }
    });
    if (st.actions.empty()) r.fail(spath, "state has no <action>");
    if (!net.add_state(std::move(st))) {
      r.fail(spath, "duplicate state id");
    }
  });
  if (kb.networks.count(id) != 0) r.fail(npath, "duplicate network id");
  kb.networks.emplace(id, std::move(net));
}

void parse_topics(FileContext& ctx, const pt::ptree& node, KnowledgeBase& kb) {
  const Reader& r = ctx.reader;
  r.children(node, "topics", [&](const std::string& name,
                                 const pt::ptree& child) {
    if (name != "topic") r.fail("topics", "unexpected <" + name + ">");
    SessionTopic topic;
    topic.name = r.required_attr(child, "name", "topics/topic");
    const auto tpath = keyed("topics", "topic", topic.name);
    topic.loc = r.loc(tpath);
    topic.network = r.attr(child, "network").value_or("");
    bool has_opening = false;
    r.children(child, tpath, [&](const std::string& cn, const pt::ptree& c) {
      if (cn == "opening") {
        if (has_opening) r.fail(tpath, "more than one <opening>");
        topic.opening = single_action(ctx, c, tpath + "/opening");
        has_opening = true;
      } else if (cn == "subnetwork") {
        topic.subnetwork_entries.push_back(
            r.required_attr(c, "state", tpath + "/subnetwork"));
      } else {
        r.fail(tpath, "unexpected <" + cn + "> in <topic>");
      }
    });
    if (!has_opening) r.fail(tpath, "missing <opening>");
    if (!topic.subnetwork_entries.empty() && topic.network.empty()) {
      r.fail(tpath, "subnetworks listed without a network attribute");
    }
    if (kb.find_topic(topic.name) != nullptr) {
      r.fail(tpath, "duplicate session topic");
    }
    kb.session_topics.push_back(std::move(topic));
  });
}

void parse_section(FileContext& ctx, const std::string& name,
                   const pt::ptree& node, KnowledgeBase& kb) {
  if (name == "dictionary") {
    parse_dictionary(ctx, node, kb);
  } else if (name == "responses") {
    parse_responses(ctx, node, kb);
  } else if (name == "network") {
    parse_network(ctx, node, kb);
  } else if (name == "topics") {
    parse_topics(ctx, node, kb);
  } else if (name == "knowledge") {
    for (const auto& [cn, c] : node) {
      if (cn == kAttrKey) continue;
      if (cn == "knowledge") ctx.reader.fail("knowledge", "nested <knowledge>");
      parse_section(ctx, cn, c, kb);
    }
  } else {
    ctx.reader.fail("", "unexpected root element <" + name + ">");
  }
}

pt::ptree read_tree(const XmlSource& src) {
  pt::ptree tree;
  std::istringstream in(src.text);
  try {
    pt::read_xml(in, tree, pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw KnowledgeError(src.name, static_cast<int>(e.line()), "",
                         "malformed XML: " + e.message());
  }
  if (tree.size() != 1) {
    throw KnowledgeError(src.name, 0, "",
                         "expected exactly one root element");
  }
  return tree;
}

void parse_declarations(const XmlSource& src, KnowledgeBase& kb) {
  const auto tree = read_tree(src);
  const auto& [root_name, root] = tree.front();
  Reader r(src.name);
  if (root_name != "acttypes") {
    r.fail("", "declarations root must be <acttypes>, got <" + root_name + ">");
  }
  std::vector<std::pair<std::string, const pt::ptree*>> type_nodes;
  r.children(root, "acttypes", [&](const std::string& name,
                                   const pt::ptree& child) {
    if (name == "slotclass") {
      SlotClassDecl d;
      d.name = r.required_attr(child, "name", "acttypes/slotclass");
      d.description = r.text(child);
      if (kb.has_slot_class(d.name)) {
        r.fail(keyed("acttypes", "slotclass", d.name), "duplicate slot class");
      }
      kb.slot_classes.push_back(std::move(d));
    } else if (name == "supertype") {
      auto st = r.required_attr(child, "name", "acttypes/supertype");
      if (kb.act_types.has_supertype(st)) {
        r.fail(keyed("acttypes", "supertype", st), "duplicate supertype");
      }
      kb.act_types.supertypes.push_back(std::move(st));
    } else if (name == "type") {
      type_nodes.emplace_back(
          r.required_attr(child, "name", "acttypes/type"), &child);
    } else {
      r.fail("acttypes", "unexpected <" + name + ">");
    }
  });
  for (const auto& [type_name, node] : type_nodes) {
    const auto path = keyed("acttypes", "type", type_name);
    TypeDecl t;
    t.name = type_name;
    t.supertype = r.required_attr(*node, "supertype", path);
    if (!kb.act_types.has_supertype(t.supertype)) {
      r.fail(path, "undeclared supertype '" + t.supertype + "'");
    }
    auto add_signature = [&](std::string_view text) {
      std::vector<std::string> sig;
      for (const auto& tok : tokenize_all(text)) {
        if (!kb.has_slot_class(tok.surface)) {
          r.fail(path, "undeclared slot class '" + tok.surface + "'");
        }
        sig.push_back(tok.surface);
      }
      std::sort(sig.begin(), sig.end());
      t.signatures.push_back(std::move(sig));
    };
    if (auto slots = r.attr(*node, "slots")) add_signature(*slots);
    r.children(*node, path, [&](const std::string& cn, const pt::ptree& c) {
      if (cn != "slots") r.fail(path, "unexpected <" + cn + "> in <type>");
      add_signature(c.data());
    });
    if (kb.act_types.types.count(t.name) != 0) {
      r.fail(path, "duplicate type");
    }
    kb.act_types.types.emplace(t.name, std::move(t));
  }
}

// Cross-reference checks against the declarations.
void check_references(const KnowledgeBase& kb) {
  auto fail = [](const SourceLoc& loc, const std::string& msg) {
    throw KnowledgeError(loc.file, 0, loc.path, msg);
  };
  for (const auto& e : kb.dictionary.entries()) {
    if (!kb.has_slot_class(e.slot_class)) {
      fail(e.loc, "undeclared slot class '" + e.slot_class + "'");
    }
  }
  for (const auto& [type, actions] : kb.responses.response_pairs) {
    if (!kb.act_types.has_type(type)) {
      fail(actions.empty() ? SourceLoc{} : actions.front().loc,
           "undeclared type '" + type + "'");
    }
  }
  for (const auto& [st, actions] : kb.responses.default_responses) {
    if (!kb.act_types.has_supertype(st)) {
      fail(actions.empty() ? SourceLoc{} : actions.front().loc,
           "undeclared supertype '" + st + "'");
    }
  }
  for (const auto& [id, net] : kb.networks) {
    for (const auto& st : net.states()) {
      for (const auto& t : st.transitions) {
        for (const auto& c : t.conditions) {
          if (const auto* s = std::get_if<SupertypeIs>(&c)) {
            if (!kb.act_types.has_supertype(s->name)) {
              fail(t.loc, "undeclared supertype '" + s->name + "'");
            }
          } else if (const auto* ty = std::get_if<TypeIs>(&c)) {
            if (!kb.act_types.has_type(ty->name)) {
              fail(t.loc, "undeclared type '" + ty->name + "'");
            }
          }
        }
      }
    }
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw KnowledgeError(path.string(), 0, "", "cannot open file");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

KnowledgeBase load_knowledge_from_strings(std::span<const XmlSource> files,
                                          const XmlSource& declarations) {
  KnowledgeBase kb;
  parse_declarations(declarations, kb);
  for (const auto& src : files) {
    const auto tree = read_tree(src);
    Reader reader(src.name);
    FileContext ctx{reader, {}};
    const auto& [name, root] = tree.front();
    parse_section(ctx, name, root, kb);
  }
  check_references(kb);
  return kb;
}

KnowledgeBase load_knowledge(std::span<const std::filesystem::path> files,
                             const std::filesystem::path& declarations) {
  std::vector<XmlSource> sources;
  sources.reserve(files.size());
  for (const auto& f : files) {
    sources.push_back({f.string(), read_file(f)});
  }
  return load_knowledge_from_strings(
      sources, XmlSource{declarations.string(), read_file(declarations)});
}

}  // namespace exchat
