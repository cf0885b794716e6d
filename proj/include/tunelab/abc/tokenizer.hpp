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

#include <string>
#include <string_view>
#include <vector>

#include "tunelab/abc/key.hpp"
#include "tunelab/abc/token.hpp"
#include "tunelab/common/error.hpp"
#include "tunelab/common/rational.hpp"

namespace tunelab::abc {

class TokenizeError : public ParseError {
 public:
  using ParseError::ParseError;
};

// The unit note length that token durations are expressed in.
inline constexpr Rational kTokenUnit{1, 8};

// Tokenizes an ABC body into `<s> M:.. K:.. ... <\s>`.
//
// `unit` is the body's L: value; durations are rescaled to eighths. Ornaments,
// slurs, ties, decorations, chord symbols and grace groups are dropped; broken
// rhythm marks are folded into explicit durations. Throws TokenizeError naming
// the offending position.
TokenSeq tokenize_body(std::string_view body, std::string_view meter, const KeySpec& key,
                       Rational unit = kTokenUnit);

// Meter token text for an M: field value ("4/4" -> "M:4/4").
std::string meter_token(std::string_view meter);

// Length of a bar in whole notes for a meter token ("M:6/8" -> 3/4).
Rational meter_length(std::string_view meter_token_text);

// Inverse of tokenize_body for grammar-valid sequences: an ABC tune with X:, M:,
// L: 1/8 and K: headers. Throws Error for an invalid sequence.
std::string detokenize(const TokenSeq& seq);

// Just the body text that detokenize would write.
std::string detokenize_body(const TokenSeq& seq);

// One tune read from ABC text.
struct AbcTune {
  std::string title;
  std::string meter = "4/4";
  std::string unit = "1/8";
  std::string key = "C";
  std::string body;
};

// Splits ABC text into tunes. Header fields run up to and including K:; the
// body is everything after it until a blank line or the next X:.
std::vector<AbcTune> parse_abc(std::string_view text);

Rational parse_unit(std::string_view text);

// parse_abc + parse_key + tokenize_body on the first tune.
TokenSeq tokenize_abc(std::string_view text);

}  // namespace tunelab::abc
