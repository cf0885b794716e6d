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

// Bar-level view of a token sequence shared by the score operations.

#include <cstddef>
#include <vector>

#include "tunelab/abc/token.hpp"
#include "tunelab/common/rational.hpp"

namespace tunelab::score::detail {

struct Bar {
  std::size_t begin = 0;  // content token range [begin, end)
  std::size_t end = 0;
  bool opens_repeat = false;
  int variant = 0;
  bool closes_repeat = false;
};

struct SectionPlan {
  std::vector<std::vector<std::size_t>> passes;  // bar indices in playing order
  std::size_t written_bars = 0;                  // body + first ending
  bool repeated = false;
  bool unbalanced_open = false;
};

// Index of the first body token and one past the last.
std::pair<std::size_t, std::size_t> body_range(const abc::TokenSeq& seq);

std::vector<Bar> split_bars(const abc::TokenSeq& seq);

// Groups bars into sections and passes. In strict mode a second `|:` before
// the first is closed throws StructureError; otherwise the first is treated
// as an unclosed plain section.
std::vector<SectionPlan> plan_sections(const std::vector<Bar>& bars, bool strict);

Rational meter_of(const abc::TokenSeq& seq);

}  // namespace tunelab::score::detail

#include <functional>

namespace tunelab::score::detail {

// One rhythmic slot: a note, a rest or a chord. Lengths are in 1/8 units and
// already carry any tuplet scaling.
struct NoteSlot {
  std::size_t position = 0;
  std::vector<std::pair<std::size_t, Rational>> notes;  // pitch token index, length
  Rational advance{0};
};

Rational parse_duration(std::string_view text);
bool compound_meter(const abc::TokenSeq& seq);

// Walks [begin, end) calling on_slot for every note/chord and on_bar for every
// barline token. A dangling duration throws SemanticsError when `strict`.
void walk_notes(const abc::TokenSeq& seq, std::size_t begin, std::size_t end, bool compound, bool strict,
                const std::function<void(const NoteSlot&)>& on_slot,
                const std::function<void(std::size_t)>& on_bar);

}  // namespace tunelab::score::detail
