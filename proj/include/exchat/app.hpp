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

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "exchat/engine.hpp"
#include "exchat/knowledge.hpp"
#include "exchat/nlu.hpp"
#include "exchat/registry.hpp"

namespace exchat {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One JSON document. Relative paths are resolved against the directory of
// the config file.
struct ServiceConfig {
  std::filesystem::path declarations;
  std::vector<std::filesystem::path> knowledge;
  std::filesystem::path model;
  std::string domain = "none";        // "none" or "minifood"
  std::filesystem::path relations;    // minifood only
  std::optional<double> theta_super;  // overrides the model's thresholds
  std::optional<double> theta_type;
  EngineConfig engine;
  int max_turns = 15;
  std::string closing_message = "That's all the time we have today. Thank you for chatting with me!";
  std::string bind = "127.0.0.1:8080";
  std::filesystem::path log;  // empty: no turn log
  std::filesystem::path session_dump;
  double idle_expiry_hours = 24.0;
};

// Throws ConfigError on malformed JSON, bad values or missing files.
ServiceConfig parse_config(std::string_view json_text,
                           const std::filesystem::path& base_dir = {});
ServiceConfig load_config(const std::filesystem::path& path);

// EXCHAT_BIND and EXCHAT_LOG take precedence over the file.
void apply_env_overrides(ServiceConfig& config);

FunctionRegistry make_domain_registry(const ServiceConfig& config,
                                      std::shared_ptr<const KnowledgeBase> kb);

// Everything a running dialogue system needs, loaded once and shared.
struct App {
  ServiceConfig config;
  std::shared_ptr<const KnowledgeBase> kb;
  std::shared_ptr<const NluModel> model;
  std::shared_ptr<const FunctionRegistry> registry;
  std::shared_ptr<const DialogueEngine> engine;
};

// Throws ConfigError, KnowledgeError or NluError.
App load_app(ServiceConfig config);

}  // namespace exchat
