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

#include "exchat/text.hpp"

#include <cctype>

namespace exchat {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

// Characters that stay inside a word when surrounded by word characters,
// e.g. "tully's", "x-ray", "b&b".
bool is_joiner(char c) { return c == '\'' || c == '-' || c == '&'; }

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

// U+2019 RIGHT SINGLE QUOTATION MARK, commonly typed for apostrophes.
constexpr std::string_view kCurlyApostrophe = "\xE2\x80\x99";

std::string fold_apostrophes(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (text.substr(i, kCurlyApostrophe.size()) == kCurlyApostrophe) {
      out.push_back('\'');
      i += kCurlyApostrophe.size();
    } else {
      out.push_back(text[i++]);
    }
  }
  return out;
}

}  // namespace

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  while (b < s.size() && is_space(s[b])) ++b;
  std::size_t e = s.size();
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string_view last_sentence(std::string_view text) {
  text = trim(text);
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (!is_terminator(text[i])) continue;
    std::size_t j = i;
    while (j < text.size() && is_terminator(text[j])) ++j;
    std::size_t k = j;
    while (k < text.size() && is_space(text[k])) ++k;
    if (k > j && k < text.size()) start = k;
    i = j - 1;
  }
  return text.substr(start);
}

std::vector<Token> tokenize_all(std::string_view raw) {
  const std::string text = fold_apostrophes(raw);
  std::vector<Token> tokens;
  auto emit = [&](std::string surface) {
    Token t;
    t.lower = to_lower_ascii(surface);
    t.surface = std::move(surface);
    t.position = tokens.size();
    tokens.push_back(std::move(t));
  };
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (!is_word_byte(static_cast<unsigned char>(c))) {
      emit(std::string(1, c));
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size()) {
      const auto cj = static_cast<unsigned char>(text[j]);
      if (is_word_byte(cj)) {
        ++j;
      } else if (is_joiner(text[j]) && j + 1 < text.size() &&
                 is_word_byte(static_cast<unsigned char>(text[j + 1]))) {
        j += 2;
      } else {
        break;
      }
    }
    emit(text.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::vector<Token> tokenize(std::string_view text) {
  if (trim(text).empty()) throw EmptyInputError();
  return tokenize_all(last_sentence(text));
}

std::string join_lower(const std::vector<Token>& tokens, std::size_t begin,
                       std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end && i < tokens.size(); ++i) {
    if (i > begin) out.push_back(' ');
    out += tokens[i].lower;
  }
  return out;
}

std::string join_surface(const std::vector<Token>& tokens, std::size_t begin,
                         std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end && i < tokens.size(); ++i) {
    if (i > begin) out.push_back(' ');
    out += tokens[i].surface;
  }
  return out;
}

std::string normalize_surface(std::string_view text) {
  const auto tokens = tokenize_all(text);
  return join_lower(tokens, 0, tokens.size());
}

}  // namespace exchat
