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

#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace exchat {

struct Literal {
  std::string text;
  bool operator==(const Literal&) const = default;
};

struct VarRef {
  std::string name;
  bool operator==(const VarRef&) const = default;
};

using CallArg = std::variant<VarRef, Literal>;

struct FunctionCall {
  std::string name;
  std::vector<CallArg> args;
  bool operator==(const FunctionCall&) const = default;
};

// Right-hand side of a variable setting: `food-drink1`, `"noodle"` or
// `fn(arg, "sym")`.
using Expr = std::variant<Literal, VarRef, FunctionCall>;

class TemplateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A system utterance with embedded `*var*` and `*fn(arg)*` references.
// A literal asterisk is written `**`.
struct UtteranceTemplate {
  using Segment = std::variant<Literal, VarRef, FunctionCall>;
  std::vector<Segment> segments;

  static UtteranceTemplate parse(std::string_view text);
  static UtteranceTemplate literal(std::string text);

  std::string to_string() const;
  bool is_literal() const;
  bool empty() const { return segments.empty(); }

  bool operator==(const UtteranceTemplate&) const = default;
};

bool is_identifier(std::string_view s);

Expr parse_expr(std::string_view text);
FunctionCall parse_call(std::string_view text);

std::string to_string(const Expr& expr);
std::string to_string(const FunctionCall& call);
std::string to_string(const CallArg& arg);

}  // namespace exchat
