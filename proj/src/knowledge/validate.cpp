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

#include "exchat/validate.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>

#include "json.hpp"

namespace exchat {

namespace {

enum class FnKind { kBool, kString };

class Checker {
 public:
  Checker(const KnowledgeBase& kb, const FunctionRegistry& registry,
          const ValidateOptions& options)
      : kb_(kb), registry_(registry), options_(options) {}

  std::vector<Diagnostic> run() {
    collect_writers();
    collect_targets();
    for_each_action([&](const ActionDescription& a) { check_action(a); });
    check_networks();
    check_topics();
    check_variables();
    check_fallback();
    return std::move(out_);
  }

 private:
  void add(Severity sev, std::string code, const SourceLoc& loc, std::string msg) {
    out_.push_back({sev, std::move(code), std::move(msg), loc.file, loc.path});
  }

  void for_each_action(const std::function<void(const ActionDescription&)>& fn) const {
    const auto& rk = kb_.responses;
    for (const auto& [_, v] : rk.response_pairs) for (const auto& a : v) fn(a);
    for (const auto& [_, v] : rk.default_responses) for (const auto& a : v) fn(a);
    for (const auto& e : rk.example_responses) fn(e.action);
    for (const auto& r : rk.related_responses) fn(r.action);
    for (const auto& a : rk.non_responses) fn(a);
    for (const auto& [_, net] : kb_.networks) {
      for (const auto& st : net.states()) for (const auto& a : st.actions) fn(a);
    }
    for (const auto& t : kb_.session_topics) fn(t.opening);
  }

  void collect_writers() {
    for_each_action([&](const ActionDescription& a) {
      for (const auto& s : a.variable_settings) {
        if (s.value) writers_.insert(s.variable);
      }
    });
  }

  // Literal activation targets per network, plus every topic entry.
  void collect_targets() {
    for_each_action([&](const ActionDescription& a) {
      if (!a.expert_activation || !a.expert_activation->initial_state.is_literal()) return;
      targets_[a.expert_activation->expert_id].insert(
          a.expert_activation->initial_state.to_string());
    });
    for (const auto& t : kb_.session_topics) {
      for (const auto& e : t.subnetwork_entries) targets_[t.network].insert(e);
    }
  }

  void read(const std::string& var, const SourceLoc& loc) {
    reads_.emplace(var, loc);
  }

  void check_fn(const FunctionCall& call, FnKind kind, const SourceLoc& loc) {
    for (const auto& arg : call.args) {
      if (const auto* v = std::get_if<VarRef>(&arg)) read(v->name, loc);
    }
    const bool as_bool = registry_.has_bool(call.name);
    const bool as_string = registry_.has_string(call.name);
    if (!as_bool && !as_string) {
      add(Severity::kError, "unknown-function", loc,
          "function '" + call.name + "' is not registered");
    } else if ((kind == FnKind::kBool) != as_bool) {
      add(Severity::kError, "wrong-function-kind", loc,
          "function '" + call.name + "' is registered as " +
              (as_bool ? "boolean" : "string") + " but used as " +
              (kind == FnKind::kBool ? "a condition" : "a value"));
    }
  }

  void check_template(const UtteranceTemplate& t, const SourceLoc& loc) {
    for (const auto& seg : t.segments) {
      if (const auto* v = std::get_if<VarRef>(&seg)) read(v->name, loc);
      if (const auto* c = std::get_if<FunctionCall>(&seg)) check_fn(*c, FnKind::kString, loc);
    }
  }

  void check_action(const ActionDescription& a) {
    if (a.condition) check_fn(*a.condition, FnKind::kBool, a.loc);
    for (const auto& u : a.utterances) check_template(u, a.loc);
    for (const auto& s : a.variable_settings) {
      if (!s.value) continue;
      if (const auto* v = std::get_if<VarRef>(&*s.value)) read(v->name, a.loc);
      if (const auto* c = std::get_if<FunctionCall>(&*s.value)) {
        check_fn(*c, FnKind::kString, a.loc);
      }
    }
    if (!a.expert_activation) return;
    const auto& act = *a.expert_activation;
    check_template(act.initial_state, a.loc);
    const Network* net = kb_.find_network(act.expert_id);
    if (!net) {
      add(Severity::kError, "unknown-network", a.loc,
          "activation names unknown network '" + act.expert_id + "'");
    } else if (act.initial_state.is_literal() &&
               !net->contains(act.initial_state.to_string())) {
      add(Severity::kError, "dangling-activation", a.loc,
          "activation target '" + act.initial_state.to_string() +
              "' is not a state of network '" + act.expert_id + "'");
    }
  }

  void check_networks() {
    for (const auto& [id, net] : kb_.networks) {
      const auto& roots = targets_[id];
      for (const auto& st : net.states()) {
        for (const auto& t : st.transitions) {
          if (!net.contains(t.destination)) {
            add(Severity::kError, "dangling-destination", t.loc,
                "transition to undefined state '" + t.destination + "'");
          }
          for (const auto& c : t.conditions) {
            if (const auto* f = std::get_if<FunctionCall>(&c)) check_fn(*f, FnKind::kBool, t.loc);
          }
        }
        if (roots.count(st.id)) {
          for (const auto& a : st.actions) {
            if (a.expert_activation) {
              add(Severity::kError, "nested-activation", a.loc,
                  "action of activation target '" + st.id +
                      "' activates another expert");
            }
          }
        }
      }

      std::set<std::string> seen;
      std::deque<std::string> queue;
      for (const auto& r : roots) {
        if (net.contains(r) && seen.insert(r).second) queue.push_back(r);
      }
      while (!queue.empty()) {
        const auto* st = net.find(queue.front());
        queue.pop_front();
        for (const auto& t : st->transitions) {
          if (net.contains(t.destination) && seen.insert(t.destination).second) {
            queue.push_back(t.destination);
          }
        }
      }
      for (const auto& st : net.states()) {
        if (!seen.count(st.id)) {
          add(Severity::kWarning, "unreachable-state", st.loc,
              "state '" + st.id + "' is not reachable from any entry or activation target");
        }
      }

      for (const auto& r : roots) {
        const auto* st = net.find(r);
        if (!st) continue;
        std::set<std::string> on_path;
        const auto depth = longest_path(net, *st, on_path);
        if (depth > options_.max_depth) {
          add(Severity::kWarning, "path-too-long", st->loc,
              "a path from '" + r + "' visits more than " +
                  std::to_string(options_.max_depth) + " states");
        }
      }
    }
  }

  // Number of states on the longest simple path from `st`, explored only up
  // to max_depth + 1.
  std::size_t longest_path(const Network& net, const NetworkState& st,
                           std::set<std::string>& on_path) const {
    if (on_path.size() > options_.max_depth) return on_path.size();
    on_path.insert(st.id);
    std::size_t best = on_path.size();
    for (const auto& t : st.transitions) {
      const auto* next = net.find(t.destination);
      if (!next || on_path.count(next->id)) continue;
      best = std::max(best, longest_path(net, *next, on_path));
      if (best > options_.max_depth) break;
    }
    on_path.erase(st.id);
    return best;
  }

  void check_topics() {
    for (const auto& t : kb_.session_topics) {
      if (t.network.empty()) continue;
      const Network* net = kb_.find_network(t.network);
      if (!net) {
        add(Severity::kError, "unknown-network", t.loc,
            "topic '" + t.name + "' names unknown network '" + t.network + "'");
        continue;
      }
      for (const auto& e : t.subnetwork_entries) {
        if (!net->contains(e)) {
          add(Severity::kError, "dangling-entry", t.loc,
              "subnetwork entry '" + e + "' is not a state of network '" + t.network + "'");
        }
      }
    }
  }

  void check_variables() {
    std::set<std::string> reported;
    for (const auto& [var, loc] : reads_) {
      if (writers_.count(var) || kb_.is_slot_variable(var) ||
          registry_.provides_variable(var) || !reported.insert(var).second) {
        continue;
      }
      add(Severity::kWarning, "variable-without-writer", loc,
          "variable '" + var + "' is read but never set");
    }
  }

  void check_fallback() {
    const auto& nr = kb_.responses.non_responses;
    if (kb_.responses.empty()) return;
    const bool ok = std::any_of(nr.begin(), nr.end(),
                                [](const ActionDescription& a) { return !a.condition; });
    if (ok) return;
    SourceLoc loc;
    for_each_action([&](const ActionDescription& a) {
      if (loc.file.empty()) loc.file = a.loc.file;
    });
    loc.path = "responses";
    add(Severity::kWarning, "no-fallback-non-response", loc,
        "no unconditional non-response; some inputs get the built-in fallback");
  }

  const KnowledgeBase& kb_;
  const FunctionRegistry& registry_;
  const ValidateOptions& options_;
  std::vector<Diagnostic> out_;
  std::set<std::string> writers_;
  std::map<std::string, std::set<std::string>> targets_;
  std::multimap<std::string, SourceLoc> reads_;
};

}  // namespace

std::vector<Diagnostic> validate(const KnowledgeBase& kb,
                                 const FunctionRegistry& registry,
                                 const ValidateOptions& options) {
  return Checker(kb, registry, options).run();
}

std::string to_string(Severity severity) {
  return severity == Severity::kError ? "error" : "warning";
}

std::string to_json_line(const Diagnostic& d) {
  return nlohmann::json{{"severity", to_string(d.severity)},
                        {"code", d.code},
                        {"message", d.message},
                        {"file", d.file},
                        {"path", d.path}}
      .dump();
}

std::size_t count_errors(const std::vector<Diagnostic>& diagnostics) {
  return static_cast<std::size_t>(
      std::count_if(diagnostics.begin(), diagnostics.end(),
                    [](const Diagnostic& d) { return d.severity == Severity::kError; }));
}

}  // namespace exchat
