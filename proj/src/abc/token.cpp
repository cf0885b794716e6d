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

#include "tunelab/abc/token.hpp"

#include <cctype>

#include "tunelab/abc/pitch.hpp"
#include "tunelab/common/error.hpp"

namespace tunelab::abc {
namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

bool positive_int(std::string_view s) {
  return all_digits(s) && s.find_first_not_of('0') != std::string_view::npos;
}

bool is_meter_body(std::string_view s) {
  if (s == "C" || s == "C|") return true;
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return false;
  return positive_int(s.substr(0, slash)) && positive_int(s.substr(slash + 1));
}

bool is_key_body(std::string_view s) {
  if (s.empty() || s[0] < 'A' || s[0] > 'G') return false;
  s.remove_prefix(1);
  if (!s.empty() && (s[0] == '#' || s[0] == 'b')) s.remove_prefix(1);
  return s == "maj" || s == "min" || s == "dor" || s == "mix" || s == "lyd" || s == "phr" ||
         s == "loc";
}

bool is_duration(std::string_view s) {
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return positive_int(s);
  const auto num = s.substr(0, slash);
  const auto den = s.substr(slash + 1);
  if (!positive_int(den)) return false;
  return num.empty() || positive_int(num);
}

}  // namespace

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Transcription: return "transcription";
    case TokenKind::Meter: return "meter";
    case TokenKind::Key: return "key";
    case TokenKind::Measure: return "measure";
    case TokenKind::Pitch: return "pitch";
    case TokenKind::Grouping: return "grouping";
    case TokenKind::Duration: return "duration";
  }
  return "?";
}

bool is_variant_ending(std::string_view text) {
  return text.size() == 2 && text[0] == '|' && text[1] >= '1' && text[1] <= '9';
}

bool is_barline(std::string_view text) {
  return text == "|" || text == "|:" || text == ":|" || is_variant_ending(text);
}

bool is_rest(std::string_view text) { return text == "z"; }

std::optional<TokenKind> classify_token(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (text == kStartToken || text == kEndToken) return TokenKind::Transcription;
  if (text.starts_with("M:")) {
    if (is_meter_body(text.substr(2))) return TokenKind::Meter;
    return std::nullopt;
  }
  if (text.starts_with("K:")) {
    if (is_key_body(text.substr(2))) return TokenKind::Key;
    return std::nullopt;
  }
  if (is_barline(text) || text == "[" || text == "]") return TokenKind::Measure;
  if (text.size() >= 2 && text[0] == '(' && text.size() <= 3 && positive_int(text.substr(1)) &&
      text[1] >= '2')
    return TokenKind::Grouping;
  if (is_duration(text)) return TokenKind::Duration;
  if (is_rest(text)) return TokenKind::Pitch;
  if (auto p = parse_pitch(text); p && format_pitch(*p) == text) return TokenKind::Pitch;
  return std::nullopt;
}

Token make_token(std::string_view text) {
  auto kind = classify_token(text);
  if (!kind) throw ParseError("unknown token '" + std::string(text) + "'", 0);
  return Token{*kind, std::string(text)};
}

std::vector<std::string> split_tokens(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

TokenSeq parse_tokens(std::string_view line) {
  TokenSeq seq;
  std::size_t index = 0;
  for (auto& text : split_tokens(line)) {
    auto kind = classify_token(text);
    if (!kind) throw ParseError("unknown token '" + text + "'", index);
    seq.push_back(Token{*kind, std::move(text)});
    ++index;
  }
  return seq;
}

std::string format_tokens(const TokenSeq& seq) {
  std::string out;
  for (const auto& t : seq) {
    if (!out.empty()) out += ' ';
    out += t.text;
  }
  return out;
}

}  // namespace tunelab::abc
