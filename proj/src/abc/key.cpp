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

#include "tunelab/abc/key.hpp"

#include <algorithm>
#include <cstdlib>
#include <cctype>
#include <string>

#include "tunelab/abc/pitch.hpp"
#include "tunelab/common/error.hpp"

namespace tunelab::abc {
namespace {

// Fifths position of each natural letter C..B.
constexpr std::array<int, 7> kLetterFifths = {0, 2, 4, -1, 1, 3, 5};
// Sharps are added in the order F C G D A E B; flats in reverse.
constexpr std::array<int, 7> kSharpOrder = {3, 0, 4, 1, 5, 2, 6};

int mode_offset(Mode mode) {
  switch (mode) {
    case Mode::Major: return 0;
    case Mode::Mixolydian: return -1;
    case Mode::Dorian: return -2;
    case Mode::Minor: return -3;
    case Mode::Phrygian: return -4;
    case Mode::Locrian: return -5;
    case Mode::Lydian: return 1;
  }
  return 0;
}

struct ModeWord {
  std::string_view full;
  Mode mode;
};

constexpr std::array<ModeWord, 9> kModeWords = {{
    {"major", Mode::Major},
    {"ionian", Mode::Major},
    {"minor", Mode::Minor},
    {"aeolian", Mode::Minor},
    {"dorian", Mode::Dorian},
    {"mixolydian", Mode::Mixolydian},
    {"lydian", Mode::Lydian},
    {"phrygian", Mode::Phrygian},
    {"locrian", Mode::Locrian},
}};

}  // namespace

bool is_corpus_mode(Mode mode) {
  return mode == Mode::Major || mode == Mode::Minor || mode == Mode::Dorian || mode == Mode::Mixolydian;
}

std::string_view mode_abbrev(Mode mode) {
  switch (mode) {
    case Mode::Major: return "maj";
    case Mode::Minor: return "min";
    case Mode::Dorian: return "dor";
    case Mode::Mixolydian: return "mix";
    case Mode::Lydian: return "lyd";
    case Mode::Phrygian: return "phr";
    case Mode::Locrian: return "loc";
  }
  return "";
}

KeySpec parse_key(std::string_view text) {
  std::size_t i = 0;
  auto skip_space = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_space();
  if (text.substr(i).starts_with("K:")) {
    i += 2;
    skip_space();
  }
  if (i >= text.size()) throw ParseError("empty key", i);
  KeySpec key;
  const int letter = letter_index(text[i]);
  if (letter < 0 || text[i] > 'G') throw ParseError("unrecognized key root '" + std::string(text) + "'", i);
  key.root_letter = letter;
  ++i;
  if (i < text.size() && (text[i] == '#' || text[i] == 'b')) {
    key.root_accidental = text[i] == '#' ? 1 : -1;
    ++i;
  }
  key.root = ((natural_pitch_class(letter) + key.root_accidental) % 12 + 12) % 12;

  skip_space();
  std::string word;
  const std::size_t word_start = i;
  while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) {
    word += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
    ++i;
  }
  skip_space();
  if (i != text.size()) throw ParseError("trailing text in key '" + std::string(text) + "'", i);

  if (word.empty()) {
    key.mode = Mode::Major;
  } else if (word == "m") {
    key.mode = Mode::Minor;
  } else {
    bool found = false;
    if (word.size() >= 3) {
      for (const auto& mw : kModeWords) {
        if (mw.full.starts_with(word)) {
          key.mode = mw.mode;
          found = true;
          break;
        }
      }
    }
    if (!found) throw ParseError("unrecognized mode '" + word + "'", word_start);
  }
  return key;
}

int signature_fifths(const KeySpec& key) {
  return kLetterFifths[static_cast<std::size_t>(key.root_letter)] + 7 * key.root_accidental +
         mode_offset(key.mode);
}

std::array<int, 7> key_signature(const KeySpec& key) {
  std::array<int, 7> sig{};
  int fifths = signature_fifths(key);
  // Beyond seven sharps or flats letters take doubles.
  for (int n = 0; n < std::abs(fifths); ++n) {
    const int slot = n % 7;
    if (fifths > 0) {
      sig[static_cast<std::size_t>(kSharpOrder[static_cast<std::size_t>(slot)])] += 1;
    } else {
      sig[static_cast<std::size_t>(kSharpOrder[static_cast<std::size_t>(6 - slot)])] -= 1;
    }
  }
  return sig;
}

std::string key_name(const KeySpec& key) {
  std::string out(1, letter_from_index(key.root_letter));
  if (key.root_accidental > 0) out += '#';
  if (key.root_accidental < 0) out += 'b';
  out += mode_abbrev(key.mode);
  return out;
}

std::string key_token(const KeySpec& key) { return "K:" + key_name(key); }

int shift_to_c(const KeySpec& key) { return ((0 - key.root + 5) % 12 + 12) % 12 - 5; }

}  // namespace tunelab::abc
