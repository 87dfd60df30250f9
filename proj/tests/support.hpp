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
#include <string>
#include <vector>

#include "exchat/app.hpp"
#include "exchat/knowledge.hpp"
#include "exchat/minifood.hpp"

namespace exchat::testing {

inline std::filesystem::path source_dir() { return EXCHAT_SOURCE_DIR; }
inline std::filesystem::path minifood_dir() { return source_dir() / "data" / "minifood"; }
inline std::filesystem::path fixture_dir(const std::string& name) {
  return source_dir() / "tests" / "fixtures" / name;
}

inline std::vector<std::filesystem::path> in_dir(const std::filesystem::path& dir,
                                                 std::initializer_list<const char*> names) {
  std::vector<std::filesystem::path> out;
  for (const char* n : names) out.push_back(dir / n);
  return out;
}

inline KnowledgeBase load_coffee_kb() {
  const auto dir = fixture_dir("coffee");
  const auto files =
      in_dir(dir, {"dictionary.xml", "responses.xml", "network-coffee.xml", "topics.xml"});
  return load_knowledge(files, dir / "declarations.xml");
}

inline KnowledgeBase load_minifood_kb() {
  const auto dir = minifood_dir();
  const auto files = in_dir(
      dir, {"dictionary.xml", "responses.xml", "network-food.xml", "topics.xml"});
  return load_knowledge(files, dir / "declarations.xml");
}

inline App load_minifood_app() {
  return load_app(load_config(minifood_dir() / "config.json"));
}

}  // namespace exchat::testing
