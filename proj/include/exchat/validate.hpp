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

#include <string>
#include <vector>

#include "exchat/knowledge.hpp"
#include "exchat/registry.hpp"

namespace exchat {

enum class Severity { kError, kWarning };

struct Diagnostic {
  Severity severity = Severity::kError;
  std::string code;
  std::string message;
  std::string file;
  std::string path;  // element path inside the file

  bool operator==(const Diagnostic&) const = default;
};

struct ValidateOptions {
  // Longest acceptable run of states from a subnetwork entry.
  std::size_t max_depth = 6;
};

// Diagnostic codes:
//   errors:   dangling-destination, dangling-entry, unknown-network,
//             dangling-activation, unknown-function, wrong-function-kind,
//             nested-activation
//   warnings: unreachable-state, variable-without-writer, path-too-long,
//             no-fallback-non-response
std::vector<Diagnostic> validate(const KnowledgeBase& kb,
                                 const FunctionRegistry& registry,
                                 const ValidateOptions& options = {});

std::string to_string(Severity severity);

// One compact JSON object, no trailing newline.
std::string to_json_line(const Diagnostic& d);

std::size_t count_errors(const std::vector<Diagnostic>& diagnostics);

}  // namespace exchat
