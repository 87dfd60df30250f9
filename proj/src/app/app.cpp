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

#include "exchat/app.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "exchat/minifood.hpp"

namespace exchat {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

void require_file(const fs::path& p, const std::string& what) {
  if (p.empty()) throw ConfigError("missing " + what + " path");
  if (!fs::is_regular_file(p)) throw ConfigError(what + " not found: " + p.string());
}

}  // namespace

ServiceConfig parse_config(std::string_view json_text, const fs::path& base_dir) {
  ServiceConfig c;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    c.declarations = resolve(base_dir, j.at("declarations").get<std::string>());
    for (const auto& k : j.at("knowledge")) {
      c.knowledge.push_back(resolve(base_dir, k.get<std::string>()));
    }
    c.model = resolve(base_dir, j.at("model").get<std::string>());
    c.domain = j.value("domain", c.domain);
    if (j.contains("relations")) {
      c.relations = resolve(base_dir, j["relations"].get<std::string>());
    }
    if (j.contains("thresholds")) {
      const auto& t = j["thresholds"];
      if (t.contains("supertype")) c.theta_super = t["supertype"].get<double>();
      if (t.contains("type")) c.theta_type = t["type"].get<double>();
      if (t.contains("retrieval")) {
        c.engine.retrieval_threshold = t["retrieval"].get<double>();
      }
      if (t.contains("obligation") && !t["obligation"].is_null()) {
        c.engine.obligation_threshold = t["obligation"].get<double>();
      }
    }
    if (j.contains("obligation_supertypes")) {
      c.engine.obligation_supertypes =
          j["obligation_supertypes"].get<std::vector<std::string>>();
    }
    if (j.contains("scores")) {
      auto& s = c.engine.scores;
      const auto& js = j["scores"];
      s.network_just_activated = js.value("network_just_activated", s.network_just_activated);
      s.response_obligation = js.value("response_obligation", s.response_obligation);
      s.network_transition = js.value("network_transition", s.network_transition);
      s.response_candidate = js.value("response_candidate", s.response_candidate);
      s.network_unconditional = js.value("network_unconditional", s.network_unconditional);
      s.response_fallback = js.value("response_fallback", s.response_fallback);
    }
    c.engine.fallback_utterance = j.value("fallback_utterance", c.engine.fallback_utterance);
    c.max_turns = j.value("max_turns", c.max_turns);
    c.closing_message = j.value("closing_message", c.closing_message);
    c.bind = j.value("bind", c.bind);
    if (j.contains("log")) c.log = resolve(base_dir, j["log"].get<std::string>());
    if (j.contains("session_dump")) {
      c.session_dump = resolve(base_dir, j["session_dump"].get<std::string>());
    }
    c.idle_expiry_hours = j.value("idle_expiry_hours", c.idle_expiry_hours);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }

  if (c.max_turns < 1) throw ConfigError("max_turns must be at least 1");
  for (auto th : {c.theta_super, c.theta_type, c.engine.obligation_threshold}) {
    if (th && (*th < 0.0 || *th > 1.0)) throw ConfigError("thresholds must lie in [0, 1]");
  }
  if (c.domain != "none" && c.domain != "minifood") {
    throw ConfigError("unknown domain '" + c.domain + "'");
  }
  require_file(c.declarations, "declarations");
  for (const auto& k : c.knowledge) require_file(k, "knowledge file");
  require_file(c.model, "model");
  if (c.domain == "minifood") require_file(c.relations, "relations");
  return c;
}

ServiceConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

void apply_env_overrides(ServiceConfig& config) {
  if (const char* bind = std::getenv("EXCHAT_BIND"); bind && *bind) config.bind = bind;
  if (const char* log = std::getenv("EXCHAT_LOG"); log && *log) config.log = log;
}

FunctionRegistry make_domain_registry(const ServiceConfig& config,
                                      std::shared_ptr<const KnowledgeBase> kb) {
  if (config.domain == "minifood") {
    auto graph = std::make_shared<const minifood::FoodGraph>(
        minifood::FoodGraph::load(config.relations));
    return minifood::make_registry(std::move(kb), std::move(graph));
  }
  return FunctionRegistry::with_builtins();
}

App load_app(ServiceConfig config) {
  App app;
  auto kb = std::make_shared<KnowledgeBase>(
      load_knowledge(config.knowledge, config.declarations));
  auto model = std::make_shared<NluModel>(NluModel::load(config.model));
  if (config.theta_super) model->thresholds.supertype = *config.theta_super;
  if (config.theta_type) model->thresholds.type = *config.theta_type;
  app.kb = kb;
  app.model = model;
  app.registry = std::make_shared<FunctionRegistry>(make_domain_registry(config, kb));
  app.engine = std::make_shared<DialogueEngine>(app.kb, app.model, app.registry,
                                                config.engine);
  app.config = std::move(config);
  return app;
}

}  // namespace exchat
