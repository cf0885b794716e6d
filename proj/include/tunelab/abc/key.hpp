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

#include <array>
#include <string>
#include <string_view>

namespace tunelab::abc {

enum class Mode { Major, Minor, Dorian, Mixolydian, Lydian, Phrygian, Locrian };

// The four modes the token corpus keeps.
bool is_corpus_mode(Mode mode);
std::string_view mode_abbrev(Mode mode);  // "maj", "min", "dor", "mix", "lyd", ...

struct KeySpec {
  int root = 0;           // pitch class 0-11
  int root_letter = 0;    // C=0 .. B=6
  int root_accidental = 0;
  Mode mode = Mode::Major;

  friend bool operator==(const KeySpec&, const KeySpec&) = default;
};

// Accepts "Amixolydian", "Amix", "Ador", "Dmaj", "K:Cmin", "G", "Em", "F#m",
// "Bb major". Throws ParseError on an unrecognized root or mode word.
KeySpec parse_key(std::string_view text);

// Position on the circle of fifths of the key signature (+sharps / -flats).
int signature_fifths(const KeySpec& key);

// Accidental (in semitones) applied to each letter C..B by the signature.
std::array<int, 7> key_signature(const KeySpec& key);

// "Ador", "Cmix", "F#min".
std::string key_name(const KeySpec& key);
// Token text, e.g. "K:Cmix".
std::string key_token(const KeySpec& key);

// Semitone shift taking `key` to root C, in -5..+6.
int shift_to_c(const KeySpec& key);

}  // namespace tunelab::abc
