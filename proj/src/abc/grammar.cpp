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

#include "tunelab/abc/grammar.hpp"

#include <optional>

namespace tunelab::abc {

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::MissingStart: return "missing_start";
    case ViolationKind::MissingMeter: return "missing_meter";
    case ViolationKind::MissingKey: return "missing_key";
    case ViolationKind::MisorderedHeader: return "misordered_header";
    case ViolationKind::UnknownToken: return "unknown_token";
    case ViolationKind::MisplacedToken: return "misplaced_token";
    case ViolationKind::DanglingDuration: return "dangling_duration";
    case ViolationKind::MissingEnd: return "missing_end";
    case ViolationKind::TrailingTokens: return "trailing_tokens";
  }
  return "?";
}

GrammarReport validate_grammar(std::span<const std::string> texts) {
  GrammarReport report;
  auto add = [&](ViolationKind kind, std::size_t pos, std::string message) {
    report.violations.push_back(Violation{kind, pos, std::move(message)});
  };
  std::vector<std::optional<TokenKind>> kinds;
  kinds.reserve(texts.size());
  for (const auto& t : texts) kinds.push_back(classify_token(t));
  auto kind_at = [&](std::size_t i) -> std::optional<TokenKind> {
    return i < kinds.size() ? kinds[i] : std::nullopt;
  };

  std::size_t i = 0;
  if (!texts.empty() && texts[0] == kStartToken) {
    i = 1;
  } else {
    add(ViolationKind::MissingStart, 0, "sequence does not begin with <s>");
  }

  // Header: meter then key, tolerating a swapped pair as one violation.
  if (kind_at(i) == TokenKind::Key && kind_at(i + 1) == TokenKind::Meter) {
    add(ViolationKind::MisorderedHeader, i, "key token precedes meter token");
    i += 2;
  } else {
    if (kind_at(i) == TokenKind::Meter) {
      ++i;
    } else {
      add(ViolationKind::MissingMeter, i, "expected a meter token");
    }
    if (kind_at(i) == TokenKind::Key) {
      ++i;
    } else {
      add(ViolationKind::MissingKey, i, "expected a key token");
    }
  }

  bool duration_ok = false;
  bool ended = false;
  for (; i < texts.size(); ++i) {
    if (ended) {
      add(ViolationKind::TrailingTokens, i, "token after <\\s>");
      break;
    }
    const auto kind = kinds[i];
    if (!kind) {
      add(ViolationKind::UnknownToken, i, "unknown token '" + texts[i] + "'");
      duration_ok = false;
      continue;
    }
    switch (*kind) {
      case TokenKind::Transcription:
        if (texts[i] == kEndToken) {
          ended = true;
        } else {
          add(ViolationKind::MisplacedToken, i, "<s> inside transcription");
        }
        duration_ok = false;
        break;
      case TokenKind::Meter:
      case TokenKind::Key:
        add(ViolationKind::MisplacedToken, i, "header token '" + texts[i] + "' inside body");
        duration_ok = false;
        break;
      case TokenKind::Duration:
        if (!duration_ok) add(ViolationKind::DanglingDuration, i, "duration '" + texts[i] + "' without a note");
        duration_ok = false;
        break;
      case TokenKind::Pitch:
        duration_ok = true;
        break;
      case TokenKind::Measure:
        duration_ok = texts[i] == "]";
        break;
      case TokenKind::Grouping:
        duration_ok = false;
        break;
    }
  }
  if (!ended) add(ViolationKind::MissingEnd, texts.size(), "sequence does not end with <\\s>");
  return report;
}

GrammarReport validate_grammar(const TokenSeq& seq) {
  std::vector<std::string> texts;
  texts.reserve(seq.size());
  for (const auto& t : seq) texts.push_back(t.text);
  return validate_grammar(texts);
}

}  // namespace tunelab::abc
