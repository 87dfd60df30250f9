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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace exchat {

struct Token {
  std::string surface;
  std::string lower;
  std::size_t position = 0;

  bool operator==(const Token&) const = default;
};

class EmptyInputError : public std::invalid_argument {
 public:
  EmptyInputError() : std::invalid_argument("empty input utterance") {}
};

// Splits user input into word and punctuation tokens. Only the final
// sentence of multi-sentence input is kept. Throws EmptyInputError when the
// text is blank.
std::vector<Token> tokenize(std::string_view text);

// Same splitting rules without sentence reduction or the emptiness check.
// Used for dictionary names and training data.
std::vector<Token> tokenize_all(std::string_view text);

// Returns the last sentence of `text` (trimmed). Sentence boundaries are runs
// of '.', '!' or '?' followed by whitespace and more text.
std::string_view last_sentence(std::string_view text);

// Lowercased tokens joined by single spaces; the key used for dictionary
// matching.
std::string normalize_surface(std::string_view text);

std::string join_lower(const std::vector<Token>& tokens, std::size_t begin,
                       std::size_t end);
std::string join_surface(const std::vector<Token>& tokens, std::size_t begin,
                         std::size_t end);

std::string to_lower_ascii(std::string_view s);
std::string_view trim(std::string_view s);

}  // namespace exchat
