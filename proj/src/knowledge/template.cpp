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

#include "exchat/template.hpp"

#include <cctype>

#include "exchat/text.hpp"

namespace exchat {

namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' ||
         c == '-';
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  Expr parse_full() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  Expr parse_expr() {
    skip_ws();
    if (peek() == '"') return Literal{parse_quoted()};
    std::string name = parse_ident();
    skip_ws();
    if (peek() != '(') return VarRef{std::move(name)};
    ++pos_;
    FunctionCall call{std::move(name), {}};
    skip_ws();
    if (peek() == ')') {
      ++pos_;
      return call;
    }
    while (true) {
      skip_ws();
      if (peek() == '"') {
        call.args.emplace_back(Literal{parse_quoted()});
      } else {
        call.args.emplace_back(VarRef{parse_ident()});
      }
      skip_ws();
      const char c = peek();
      ++pos_;
      if (c == ')') break;
      if (c != ',') fail("expected ',' or ')' in argument list");
    }
    return call;
  }

  std::string parse_ident() {
    const std::size_t start = pos_;
    if (pos_ >= text_.size() || !ident_start(text_[pos_])) {
      fail("expected identifier");
    }
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string parse_quoted() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out.push_back(text_[pos_++]);
    }
    if (pos_ >= text_.size()) fail("unterminated string literal");
    ++pos_;
    return out;
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) {
      ++pos_;
    }
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  [[noreturn]] void fail(const std::string& what) const {
    throw TemplateError(what + " at offset " + std::to_string(pos_) +
                        " in '" + std::string(text_) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void append_literal(std::vector<UtteranceTemplate::Segment>& segs,
                    std::string text) {
  if (text.empty()) return;
  if (!segs.empty()) {
    if (auto* lit = std::get_if<Literal>(&segs.back())) {
      lit->text += text;
      return;
    }
  }
  segs.emplace_back(Literal{std::move(text)});
}

}  // namespace

bool is_identifier(std::string_view s) {
  if (s.empty() || !ident_start(s.front())) return false;
  for (char c : s) {
    if (!ident_char(c)) return false;
  }
  return true;
}

Expr parse_expr(std::string_view text) { return ExprParser(text).parse_full(); }

FunctionCall parse_call(std::string_view text) {
  Expr e = parse_expr(text);
  if (auto* call = std::get_if<FunctionCall>(&e)) return std::move(*call);
  throw TemplateError("expected a function call: '" + std::string(text) + "'");
}

std::string to_string(const CallArg& arg) {
  if (const auto* v = std::get_if<VarRef>(&arg)) return v->name;
  return quote(std::get<Literal>(arg).text);
}

std::string to_string(const FunctionCall& call) {
  std::string out = call.name + "(";
  for (std::size_t i = 0; i < call.args.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_string(call.args[i]);
  }
  return out + ")";
}

std::string to_string(const Expr& expr) {
  return std::visit(
      [](const auto& e) -> std::string {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Literal>) {
          return quote(e.text);
        } else if constexpr (std::is_same_v<T, VarRef>) {
          return e.name;
        } else {
          return to_string(e);
        }
      },
      expr);
}

UtteranceTemplate UtteranceTemplate::parse(std::string_view text) {
  UtteranceTemplate t;
  std::string pending;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '*') {
      pending.push_back(text[i++]);
      continue;
    }
    if (i + 1 < text.size() && text[i + 1] == '*') {
      pending.push_back('*');
      i += 2;
      continue;
    }
    const std::size_t close = text.find('*', i + 1);
    if (close == std::string_view::npos) {
      throw TemplateError("unterminated '*' reference in '" +
                          std::string(text) + "'");
    }
    Expr e = parse_expr(trim(text.substr(i + 1, close - i - 1)));
    append_literal(t.segments, std::move(pending));
    pending.clear();
    if (auto* lit = std::get_if<Literal>(&e)) {
      append_literal(t.segments, std::move(lit->text));
    } else if (auto* var = std::get_if<VarRef>(&e)) {
      t.segments.emplace_back(std::move(*var));
    } else {
      t.segments.emplace_back(std::get<FunctionCall>(std::move(e)));
    }
    i = close + 1;
  }
  append_literal(t.segments, std::move(pending));
  return t;
}

UtteranceTemplate UtteranceTemplate::literal(std::string text) {
  UtteranceTemplate t;
  append_literal(t.segments, std::move(text));
  return t;
}

std::string UtteranceTemplate::to_string() const {
  std::string out;
  for (const auto& seg : segments) {
    if (const auto* lit = std::get_if<Literal>(&seg)) {
      for (char c : lit->text) {
        out.push_back(c);
        if (c == '*') out.push_back('*');
      }
    } else if (const auto* var = std::get_if<VarRef>(&seg)) {
      out += "*" + var->name + "*";
    } else {
      out += "*" + exchat::to_string(std::get<FunctionCall>(seg)) + "*";
    }
  }
  return out;
}

bool UtteranceTemplate::is_literal() const {
  for (const auto& seg : segments) {
    if (!std::holds_alternative<Literal>(seg)) return false;
  }
  return true;
}

}  // namespace exchat
