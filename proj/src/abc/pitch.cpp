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

#include "tunelab/abc/pitch.hpp"

#include <array>

namespace tunelab::abc {
namespace {
constexpr std::array<int, 7> kNaturalPc = {0, 2, 4, 5, 7, 9, 11};
constexpr std::string_view kLetters = "CDEFGAB";
}  // namespace

int letter_index(char letter) {
  const char upper = (letter >= 'a' && letter <= 'g') ? static_cast<char>(letter - 'a' + 'A') : letter;
  const auto pos = kLetters.find(upper);
  return pos == std::string_view::npos ? -1 : static_cast<int>(pos);
}

char letter_from_index(int index) { return kLetters[static_cast<std::size_t>(index)]; }

int natural_pitch_class(int letter) { return kNaturalPc[static_cast<std::size_t>(letter)]; }

int PitchSpelling::natural_midi() const { return 12 * (octave + 1) + kNaturalPc[static_cast<std::size_t>(letter)]; }

std::optional<PitchSpelling> parse_pitch(std::string_view text) {
  PitchSpelling p;
  std::size_t i = 0;
  if (text.starts_with("^^")) {
    p.accidental = 2;
    i = 2;
  } else if (text.starts_with("__")) {
    p.accidental = -2;
    i = 2;
  } else if (text.starts_with("^")) {
    p.accidental = 1;
    i = 1;
  } else if (text.starts_with("_")) {
    p.accidental = -1;
    i = 1;
  } else if (text.starts_with("=")) {
    p.accidental = 0;
    i = 1;
  }
  if (i >= text.size()) return std::nullopt;
  const char c = text[i++];
  const int letter = letter_index(c);
  if (letter < 0) return std::nullopt;
  p.letter = letter;
  p.octave = (c >= 'a') ? 5 : 4;
  for (; i < text.size(); ++i) {
    if (text[i] == '\'') {
      ++p.octave;
    } else if (text[i] == ',') {
      --p.octave;
    } else {
      return std::nullopt;
    }
  }
  return p;
}

std::string_view accidental_text(int accidental) {
  switch (accidental) {
    case -2: return "__";
    case -1: return "_";
    case 0: return "=";
    case 1: return "^";
    case 2: return "^^";
    default: return "";
  }
}

std::string format_pitch(const PitchSpelling& p) {
  std::string out;
  if (p.accidental) out += accidental_text(*p.accidental);
  if (p.octave >= 5) {
    out += static_cast<char>(letter_from_index(p.letter) - 'A' + 'a');
    out.append(static_cast<std::size_t>(p.octave - 5), '\'');
  } else {
    out += letter_from_index(p.letter);
    out.append(static_cast<std::size_t>(4 - p.octave), ',');
  }
  return out;
}

}  // namespace tunelab::abc
