/* Copyright 2026 The Tunelab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tunelab::abc {

// The seven token types of the transcription vocabulary.
enum class TokenKind { Transcription, Meter, Key, Measure, Pitch, Grouping, Duration };

inline constexpr std::string_view kStartToken = "<s>";
inline constexpr std::string_view kEndToken = "<\\s>";

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string text;

  friend bool operator==(const Token&, const Token&) = default;
};

using TokenSeq = std::vector<Token>;

// Kind of a token text, or nullopt if the text is not a legal token.
std::optional<TokenKind> classify_token(std::string_view text);

// Barlines proper: `|`, `|:`, `:|`, `|1`...`|9`. Excludes the chord brackets
// that share the Measure kind.
bool is_barline(std::string_view text);
bool is_variant_ending(std::string_view text);
bool is_rest(std::string_view text);

// Space-separated single-line form used by token corpus files.
std::string format_tokens(const TokenSeq& seq);
// Inverse of format_tokens. Throws ParseError on a token that does not classify.
TokenSeq parse_tokens(std::string_view line);
// Same split as parse_tokens, without classification.
std::vector<std::string> split_tokens(std::string_view line);

Token make_token(std::string_view text);

}  // namespace tunelab::abc
