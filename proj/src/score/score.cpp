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

#include "tunelab/score/score.hpp"

#include <algorithm>
#include <map>

#include "bars.hpp"
#include "tunelab/abc/key.hpp"
#include "tunelab/abc/pitch.hpp"

namespace tunelab::score {

using abc::Token;
using abc::TokenKind;
using namespace detail;

namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t bars_hash(const TokenSeq& seq, const std::vector<Bar>& bars, const std::vector<std::size_t>& which) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t b : which) {
    for (std::size_t i = bars[b].begin; i < bars[b].end; ++i) {
      h = fnv1a(seq[i].text, h);
      h = fnv1a(" ", h);
    }
    h = fnv1a("|", h);
  }
  return h;
}

Rational bar_length(const TokenSeq& seq, const Bar& bar) { return content_length(seq, bar.begin, bar.end); }

}  // namespace

// ---------------------------------------------------------------------------

TokenSeq expand_repeats(const TokenSeq& seq) {
  const auto bars = split_bars(seq);
  const auto plan = plan_sections(bars, /*strict=*/true);
  const auto [body_begin, body_end] = body_range(seq);

  TokenSeq out(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(body_begin));
  bool any = false;
  for (const auto& section : plan) {
    for (const auto& pass : section.passes) {
      for (std::size_t b : pass) {
        out.push_back(Token{TokenKind::Measure, "|"});
        out.insert(out.end(), seq.begin() + static_cast<std::ptrdiff_t>(bars[b].begin),
                   seq.begin() + static_cast<std::ptrdiff_t>(bars[b].end));
        any = true;
      }
    }
  }
  if (any) out.push_back(Token{TokenKind::Measure, "|"});
  out.insert(out.end(), seq.begin() + static_cast<std::ptrdiff_t>(body_end), seq.end());
  return out;
}

std::size_t count_measures(const TokenSeq& seq) {
  const auto plan = plan_sections(split_bars(seq), /*strict=*/true);
  std::size_t n = 0;
  for (const auto& s : plan)
    for (const auto& p : s.passes) n += p.size();
  return n;
}

// ---------------------------------------------------------------------------

Rational content_length(const TokenSeq& seq, std::size_t begin, std::size_t end) {
  Rational total{0};
  walk_notes(
      seq, begin, end, compound_meter(seq), /*strict=*/false, [&](const NoteSlot& s) { total += s.advance; },
      [](std::size_t) {});
  return total * Rational(1, 8);
}

std::vector<NoteEvent> to_note_events(const TokenSeq& seq, Rational unit) {
  abc::KeySpec key;
  for (const auto& t : seq) {
    if (t.kind == TokenKind::Key) {
      key = abc::parse_key(t.text);
      break;
    }
  }
  const auto signature = abc::key_signature(key);
  std::map<int, int> bar_accidentals;
  std::vector<NoteEvent> events;
  Rational onset{0};
  const auto [begin, end] = body_range(seq);

  walk_notes(
      seq, begin, end, compound_meter(seq), /*strict=*/true,
      [&](const NoteSlot& slot) {
        for (const auto& [pos, len] : slot.notes) {
          NoteEvent ev;
          ev.onset = onset;
          ev.duration = len * unit;
          if (!abc::is_rest(seq[pos].text)) {
            const auto p = abc::parse_pitch(seq[pos].text);
            if (!p) throw SemanticsError("malformed pitch '" + seq[pos].text + "'");
            int acc = signature[static_cast<std::size_t>(p->letter)];
            if (p->accidental) {
              acc = *p->accidental;
              bar_accidentals[p->step()] = acc;
            } else if (auto it = bar_accidentals.find(p->step()); it != bar_accidentals.end()) {
              acc = it->second;
            }
            ev.pitch = p->natural_midi() + acc;
          }
          events.push_back(ev);
        }
        onset += slot.advance * unit;
      },
      [&](std::size_t) { bar_accidentals.clear(); });
  std::stable_sort(events.begin(), events.end(),
                   [](const NoteEvent& a, const NoteEvent& b) { return a.onset < b.onset; });
  return events;
}

// ---------------------------------------------------------------------------

std::string_view to_string(MeasureClass c) {
  switch (c) {
    case MeasureClass::Full: return "full";
    case MeasureClass::Pickup: return "pickup";
    case MeasureClass::Complement: return "complement";
    case MeasureClass::Short: return "short";
    case MeasureClass::Long: return "long";
  }
  return "?";
}

MeasureValidation validate_measures(const TokenSeq& seq) {
  const Rational nominal = meter_of(seq);
  const auto bars = split_bars(seq);
  const auto plan = plan_sections(bars, /*strict=*/false);

  std::vector<Rational> lengths;
  lengths.reserve(bars.size());
  for (const auto& bar : bars) lengths.push_back(bar_length(seq, bar));

  std::vector<std::optional<MeasureClass>> cls(bars.size());
  auto basic = [&](std::size_t b) {
    if (lengths[b] == nominal) return MeasureClass::Full;
    return lengths[b] < nominal ? MeasureClass::Short : MeasureClass::Long;
  };
  for (const auto& section : plan) {
    for (const auto& pass : section.passes) {
      std::vector<MeasureClass> pass_cls;
      for (std::size_t b : pass) pass_cls.push_back(basic(b));
      if (pass.size() >= 2) {
        const std::size_t first = pass.front();
        const std::size_t last = pass.back();
        if (pass_cls.front() == MeasureClass::Short && pass_cls.back() == MeasureClass::Short &&
            lengths[first] + lengths[last] == nominal) {
          pass_cls.front() = MeasureClass::Pickup;
          pass_cls.back() = MeasureClass::Complement;
        }
      }
      for (std::size_t k = 0; k < pass.size(); ++k)
        if (!cls[pass[k]]) cls[pass[k]] = pass_cls[k];
    }
  }

  MeasureValidation out;
  for (std::size_t b = 0; b < bars.size(); ++b) {
    const MeasureClass c = cls[b].value_or(basic(b));
    out.measures.push_back(MeasureReport{b, bars[b].begin, nominal, lengths[b], c});
    if (c == MeasureClass::Short || c == MeasureClass::Long) ++out.error_count;
  }
  return out;
}

// ---------------------------------------------------------------------------

SectionStructure detect_structure(const TokenSeq& seq) {
  SectionStructure out;
  const Rational nominal = meter_of(seq);
  const auto bars = split_bars(seq);
  std::vector<Rational> lengths;
  for (const auto& bar : bars) lengths.push_back(bar_length(seq, bar));

  bool has_repeat_tokens = false;
  for (const auto& t : seq)
    if (t.text == "|:" || t.text == ":|" || abc::is_variant_ending(t.text)) has_repeat_tokens = true;

  if (has_repeat_tokens) {
    const auto plan = plan_sections(bars, /*strict=*/false);
    std::vector<Section> nontrivial;
    for (std::size_t k = 0; k < plan.size(); ++k) {
      const auto& s = plan[k];
      const auto& first_pass = s.passes.front();
      std::size_t count = first_pass.size();  // bars per pass, endings counted once
      if (first_pass.size() >= 2 && lengths[first_pass.front()] < nominal && lengths[first_pass.back()] < nominal &&
          lengths[first_pass.front()] + lengths[first_pass.back()] == nominal)
        --count;
      Section section{count, s.repeated, bars_hash(seq, bars, first_pass)};
      out.sections.push_back(section);
      const bool lone_pickup = k == 0 && !s.repeated && s.written_bars == 1 && lengths[first_pass.front()] < nominal;
      if (!lone_pickup) nontrivial.push_back(section);
    }
    out.aabb8 = nontrivial.size() == 2 && nontrivial[0].repeated && nontrivial[1].repeated &&
                nontrivial[0].bar_count == 8 && nontrivial[1].bar_count == 8;
    return out;
  }

  // Written-out form: merge split bars back into whole ones, drop a pickup.
  std::vector<std::vector<std::size_t>> merged;
  for (std::size_t b = 0; b < bars.size(); ++b) {
    if (lengths[b] < nominal && b + 1 < bars.size() && lengths[b + 1] < nominal &&
        lengths[b] + lengths[b + 1] == nominal && b > 0) {
      merged.push_back({b, b + 1});
      ++b;
      continue;
    }
    merged.push_back({b});
  }
  if (!merged.empty() && merged.front().size() == 1 && lengths[merged.front().front()] < nominal)
    merged.erase(merged.begin());

  std::vector<std::uint64_t> hashes;
  for (const auto& m : merged) hashes.push_back(bars_hash(seq, bars, m));
  auto same = [&](std::size_t a, std::size_t b, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k)
      if (hashes[a + k] != hashes[b + k]) return false;
    return true;
  };
  if (hashes.size() == 32 && same(0, 8, 6) && same(16, 24, 6)) {
    out.aabb8 = true;
    out.sections.push_back(Section{8, true, hashes[0]});
    out.sections.push_back(Section{8, true, hashes[16]});
  } else if (!merged.empty()) {
    std::vector<std::size_t> all(bars.size());
    for (std::size_t b = 0; b < bars.size(); ++b) all[b] = b;
    out.sections.push_back(Section{merged.size(), false, bars_hash(seq, bars, all)});
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(StructErrorKind kind) {
  switch (kind) {
    case StructErrorKind::RepeatedFirstEnding: return "repeated_first_ending";
    case StructErrorKind::LoneVariantEnding: return "lone_variant_ending";
    case StructErrorKind::UnmatchedChordClose: return "unmatched_chord_close";
    case StructErrorKind::UnbalancedRepeat: return "unbalanced_repeat";
  }
  return "?";
}

std::vector<StructError> find_errors(const TokenSeq& seq) {
  std::vector<StructError> errors;
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::size_t pending_first = kNone;  // an unresolved |1
  std::size_t open_repeat = kNone;
  int chord_depth = 0;

  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto& text = seq[i].text;
    if (text == "[") {
      chord_depth = 1;
    } else if (text == "]") {
      if (chord_depth == 0) {
        errors.push_back({StructErrorKind::UnmatchedChordClose, i});
      } else {
        chord_depth = 0;
      }
    } else if (abc::is_variant_ending(text)) {
      if (text == "|1") {
        if (pending_first != kNone) {
          errors.push_back({StructErrorKind::RepeatedFirstEnding, i});
          pending_first = kNone;
        } else {
          pending_first = i;
        }
      } else if (pending_first != kNone) {
        pending_first = kNone;
      } else if (text == "|2") {
        errors.push_back({StructErrorKind::LoneVariantEnding, i});
      }
    } else if (text == "|:") {
      if (pending_first != kNone) {
        errors.push_back({StructErrorKind::LoneVariantEnding, pending_first});
        pending_first = kNone;
      }
      if (open_repeat != kNone) errors.push_back({StructErrorKind::UnbalancedRepeat, open_repeat});
      open_repeat = i;
    } else if (text == ":|") {
      open_repeat = kNone;
    }
  }
  if (pending_first != kNone) errors.push_back({StructErrorKind::LoneVariantEnding, pending_first});
  if (open_repeat != kNone) errors.push_back({StructErrorKind::UnbalancedRepeat, open_repeat});
  std::sort(errors.begin(), errors.end(),
            [](const StructError& a, const StructError& b) { return a.position < b.position; });
  return errors;
}

}  // namespace tunelab::score
