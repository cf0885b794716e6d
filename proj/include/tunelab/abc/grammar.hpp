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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tunelab/abc/token.hpp"

namespace tunelab::abc {

enum class ViolationKind {
  MissingStart,
  MissingMeter,
  MissingKey,
  MisorderedHeader,
  UnknownToken,
  MisplacedToken,   // header or start token inside the body
  DanglingDuration,
  MissingEnd,
  TrailingTokens,   // anything after the end token
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::size_t position;  // token index
  std::string message;
};

struct GrammarReport {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
};

// Checks `<s>`, a meter token, a key token, a body of measure/pitch/grouping/
// duration tokens where every duration follows a pitch or chord close, and a
// final `<\s>`.
GrammarReport validate_grammar(std::span<const std::string> texts);
GrammarReport validate_grammar(const TokenSeq& seq);

}  // namespace tunelab::abc
