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

namespace tunelab::abc {

// Letter indices run C=0 .. B=6.
int letter_index(char letter);
char letter_from_index(int index);  // uppercase
int natural_pitch_class(int letter);

// A written pitch: letter, octave (uppercase C is octave 4, middle C = 60),
// and an optional explicit accidental in semitones (-2..2; 0 is a natural).
struct PitchSpelling {
  int letter = 0;
  int octave = 4;
  std::optional<int> accidental;

  int step() const { return letter + 7 * octave; }
  int natural_midi() const;

  friend bool operator==(const PitchSpelling&, const PitchSpelling&) = default;
};

// Parses a canonical or raw ABC pitch (`^c'`, `C,`, `c,` ...). Returns nullopt
// for anything else, including rests.
std::optional<PitchSpelling> parse_pitch(std::string_view text);

// Canonical text: lowercase with `'` marks from octave 5 up, uppercase with
// `,` marks at octave 4 and below.
std::string format_pitch(const PitchSpelling& p);

std::string_view accidental_text(int accidental);

}  // namespace tunelab::abc
