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
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tunelab/abc/token.hpp"
#include "tunelab/common/error.hpp"
#include "tunelab/common/rational.hpp"

namespace tunelab::score {

using abc::TokenSeq;

class StructureError : public Error {
 public:
  using Error::Error;
};

class SemanticsError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Repeats

// Plays out repeat signs and variant endings: `|: X :|` becomes `| X | X |`,
// `X |1 A :| |2 B` becomes `X A X B`. A `:|` without an opening repeats from
// the start or from the previous section end. A final variant ending spans at
// most as many bars as the first one. The output is canonical: every bar is
// bounded by `|` tokens. Throws StructureError on nested repeats.
TokenSeq expand_repeats(const TokenSeq& seq);

// Bars with content in the repeat-expanded sequence.
std::size_t count_measures(const TokenSeq& seq);

// ---------------------------------------------------------------------------
// Note events

struct NoteEvent {
  std::optional<int> pitch;  // MIDI number, nullopt for a rest
  Rational onset;            // whole notes from the start
  Rational duration;

  friend bool operator==(const NoteEvent&, const NoteEvent&) = default;
};

// Timed events for a sequence whose repeats have been expanded (repeat tokens
// that remain are read as plain barlines). Applies the key signature and
// bar-scoped accidentals; `(p` scales the next p notes. Throws SemanticsError
// on a duration token without a note.
std::vector<NoteEvent> to_note_events(const TokenSeq& seq, Rational unit = Rational(1, 8));

// ---------------------------------------------------------------------------
// Measures

enum class MeasureClass { Full, Pickup, Complement, Short, Long };
std::string_view to_string(MeasureClass c);

struct MeasureReport {
  std::size_t bar;       // written bar number, from 0
  std::size_t position;  // token index of the bar's first token
  Rational nominal;
  Rational actual;
  MeasureClass classification;
};

struct MeasureValidation {
  std::vector<MeasureReport> measures;
  std::size_t error_count = 0;  // bars classified short or long
};

// Classifies each written bar against the meter. Within every pass through a
// section, a short first bar and a short last bar that sum to one bar are a
// pickup/complement pair.
MeasureValidation validate_measures(const TokenSeq& seq);

// Length in whole notes of the content tokens [begin, end) at unit 1/8.
Rational content_length(const TokenSeq& seq, std::size_t begin, std::size_t end);

// ---------------------------------------------------------------------------
// Structure

struct Section {
  std::size_t bar_count;
  bool repeated;
  std::uint64_t content_hash;
};

struct SectionStructure {
  std::vector<Section> sections;
  bool aabb8 = false;
};

// Repeat-sign form: exactly two sections of eight bars, each repeated (a lone
// leading pickup bar is ignored). Written-out form: 32 bars after pickup
// normalisation where bars 1-6 recur as 9-14 and 17-22 recur as 25-30.
SectionStructure detect_structure(const TokenSeq& seq);

// ---------------------------------------------------------------------------
// Errors

enum class StructErrorKind { RepeatedFirstEnding, LoneVariantEnding, UnmatchedChordClose, UnbalancedRepeat };
std::string_view to_string(StructErrorKind kind);
inline constexpr std::size_t kStructErrorKinds = 4;

struct StructError {
  StructErrorKind kind;
  std::size_t position;

  friend bool operator==(const StructError&, const StructError&) = default;
};

std::vector<StructError> find_errors(const TokenSeq& seq);

// ---------------------------------------------------------------------------
// MIDI

inline constexpr int kTicksPerQuarter = 480;
inline constexpr int kDefaultTempo = 180;

// Format-0 standard MIDI file, 480 ticks per quarter note. Rests write nothing.
void write_midi(const std::vector<NoteEvent>& events, int tempo_bpm, int program, std::ostream& out);
std::vector<std::uint8_t> midi_bytes(const std::vector<NoteEvent>& events, int tempo_bpm, int program);

}  // namespace tunelab::score
