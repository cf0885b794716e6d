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

#include "bars.hpp"

#include <algorithm>

#include "tunelab/abc/tokenizer.hpp"
#include "tunelab/score/score.hpp"

namespace tunelab::score::detail {

std::pair<std::size_t, std::size_t> body_range(const abc::TokenSeq& seq) {
  std::size_t begin = 0;
  while (begin < seq.size() && (seq[begin].kind == abc::TokenKind::Transcription ||
                                seq[begin].kind == abc::TokenKind::Meter ||
                                seq[begin].kind == abc::TokenKind::Key) &&
         seq[begin].text != abc::kEndToken)
    ++begin;
  std::size_t end = begin;
  while (end < seq.size() && seq[end].text != abc::kEndToken) ++end;
  return {begin, end};
}

Rational meter_of(const abc::TokenSeq& seq) {
  for (const auto& t : seq)
    if (t.kind == abc::TokenKind::Meter) return abc::meter_length(t.text);
  return Rational(1);
}

std::vector<Bar> split_bars(const abc::TokenSeq& seq) {
  const auto [begin, end] = body_range(seq);
  std::vector<Bar> bars;
  Bar pending;
  std::size_t start = begin;
  auto close = [&](std::size_t stop) {
    if (stop > start) {
      pending.begin = start;
      pending.end = stop;
      bars.push_back(pending);
      pending = Bar{};
    }
  };
  for (std::size_t i = begin; i < end; ++i) {
    const auto& text = seq[i].text;
    if (seq[i].kind != abc::TokenKind::Measure || !abc::is_barline(text)) continue;
    close(i);
    start = i + 1;
    if (text == ":|") {
      if (!bars.empty()) bars.back().closes_repeat = true;
    } else if (text == "|:") {
      pending.opens_repeat = true;
    } else if (abc::is_variant_ending(text)) {
      pending.variant = text[1] - '0';
    }
  }
  close(end);
  return bars;
}

std::vector<SectionPlan> plan_sections(const std::vector<Bar>& bars, bool strict) {
  std::vector<SectionPlan> sections;
  const std::size_t n = bars.size();
  std::size_t pending = 0;
  bool open = false;

  auto range = [](std::size_t a, std::size_t b) {
    std::vector<std::size_t> v;
    for (std::size_t k = a; k < b; ++k) v.push_back(k);
    return v;
  };
  auto flush_plain = [&](std::size_t stop, bool unbalanced) {
    if (stop > pending) {
      SectionPlan s;
      s.passes.push_back(range(pending, stop));
      s.written_bars = stop - pending;
      s.unbalanced_open = unbalanced;
      sections.push_back(std::move(s));
    }
    pending = stop;
  };

  std::size_t i = 0;
  while (i < n) {
    const Bar& bar = bars[i];
    if (bar.opens_repeat && bar.variant == 0) {
      if (open && strict) throw StructureError("nested repeat at bar " + std::to_string(i));
      flush_plain(i, open);
      open = true;
    }
    if (bar.variant != 0) {
      const auto body = range(pending, i);
      std::vector<std::vector<std::size_t>> endings;
      std::size_t first_len = 0;
      bool last_closed = false;
      while (i < n && bars[i].variant != 0) {
        const std::size_t start = i;
        std::size_t j = i;
        bool closed = false;
        while (j < n) {
          if (j > start && (bars[j].variant != 0 || bars[j].opens_repeat)) break;
          if (!endings.empty() && j - start >= first_len) break;
          if (bars[j].closes_repeat) {
            ++j;
            closed = true;
            break;
          }
          ++j;
        }
        if (endings.empty()) first_len = j - start;
        endings.push_back(range(start, j));
        i = j;
        last_closed = closed;
        if (!closed) break;
      }
      SectionPlan s;
      for (const auto& e : endings) {
        auto pass = body;
        pass.insert(pass.end(), e.begin(), e.end());
        s.passes.push_back(std::move(pass));
      }
      if (endings.size() == 1 && last_closed) s.passes.push_back(body);
      s.written_bars = body.size() + first_len;
      s.repeated = s.passes.size() >= 2;
      sections.push_back(std::move(s));
      pending = i;
      open = false;
      continue;
    }
    if (bar.closes_repeat) {
      SectionPlan s;
      const auto body = range(pending, i + 1);
      s.passes = {body, body};
      s.written_bars = body.size();
      s.repeated = true;
      sections.push_back(std::move(s));
      pending = i + 1;
      open = false;
    }
    ++i;
  }
  flush_plain(n, open);
  return sections;
}

}  // namespace tunelab::score::detail

namespace tunelab::score::detail {

Rational parse_duration(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(std::stoll(std::string(text)));
  const std::int64_t num = slash == 0 ? 1 : std::stoll(std::string(text.substr(0, slash)));
  return Rational(num, std::stoll(std::string(text.substr(slash + 1))));
}

bool compound_meter(const abc::TokenSeq& seq) {
  for (const auto& t : seq) {
    if (t.kind != abc::TokenKind::Meter) continue;
    const auto slash = t.text.find('/');
    if (slash == std::string::npos) return false;
    const int num = std::stoi(t.text.substr(2, slash - 2));
    return num % 3 == 0 && num > 3;
  }
  return false;
}

namespace {
Rational tuplet_ratio(int p, bool compound) {
  int q = 2;
  switch (p) {
    case 2: case 4: case 8: q = 3; break;
    case 3: case 6: q = 2; break;
    default: q = compound ? 3 : 2; break;
  }
  return Rational(q, p);
}
}  // namespace

void walk_notes(const abc::TokenSeq& seq, std::size_t begin, std::size_t end, bool compound, bool strict,
                const std::function<void(const NoteSlot&)>& on_slot,
                const std::function<void(std::size_t)>& on_bar) {
  int tuplet_left = 0;
  Rational tuplet_scale{1};
  NoteSlot chord;
  bool in_chord = false;

  auto take_length = [&](std::size_t& i) {
    if (i + 1 < end && seq[i + 1].kind == abc::TokenKind::Duration) {
      ++i;
      return parse_duration(seq[i].text);
    }
    return Rational(1);
  };
  auto scale = [&] {
    if (tuplet_left > 0) {
      --tuplet_left;
      return tuplet_scale;
    }
    return Rational(1);
  };

  for (std::size_t i = begin; i < end; ++i) {
    const auto& t = seq[i];
    switch (t.kind) {
      case abc::TokenKind::Pitch: {
        const std::size_t pos = i;
        const Rational len = take_length(i);
        if (in_chord) {
          chord.notes.emplace_back(pos, len);
        } else {
          NoteSlot slot;
          slot.position = pos;
          const Rational s = scale();
          slot.notes.emplace_back(pos, len * s);
          slot.advance = len * s;
          on_slot(slot);
        }
        break;
      }
      case abc::TokenKind::Measure:
        if (t.text == "[") {
          in_chord = true;
          chord = NoteSlot{};
          chord.position = i;
        } else if (t.text == "]") {
          const Rational outer = take_length(i);
          if (in_chord && !chord.notes.empty()) {
            const Rational s = scale();
            for (auto& note : chord.notes) note.second = note.second * outer * s;
            chord.advance = chord.notes.front().second;
            on_slot(chord);
          }
          in_chord = false;
        } else {
          in_chord = false;
          on_bar(i);
        }
        break;
      case abc::TokenKind::Grouping: {
        const int p = std::stoi(t.text.substr(1));
        tuplet_left = p;
        tuplet_scale = tuplet_ratio(p, compound);
        break;
      }
      case abc::TokenKind::Duration:
        if (strict) throw SemanticsError("duration '" + t.text + "' without a note at " + std::to_string(i));
        break;
      default:
        break;
    }
  }
}

}  // namespace tunelab::score::detail
