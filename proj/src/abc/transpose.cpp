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

#include "tunelab/abc/transpose.hpp"

#include <cstdlib>
#include <map>

#include "tunelab/abc/pitch.hpp"

namespace tunelab::abc {
namespace {

PitchSpelling spelling_at(int step) {
  PitchSpelling p;
  p.letter = ((step % 7) + 7) % 7;
  p.octave = (step - p.letter) / 7;
  return p;
}

}  // namespace

int letter_shift_to_c(const KeySpec& from) {
  const int semis = shift_to_c(from);
  const int up = (7 - from.root_letter) % 7;
  const int down = up - 7;
  // Pick the letter distance whose diatonic size is closest to the semitone shift.
  const double per_letter = 12.0 / 7.0;
  return std::abs(semis - up * per_letter) <= std::abs(semis - down * per_letter) ? up : down;
}

TokenSeq transpose(const TokenSeq& seq, const KeySpec& from) {
  const int semis = shift_to_c(from);
  const int letters = letter_shift_to_c(from);
  KeySpec target = from;
  target.root = 0;
  target.root_letter = 0;
  target.root_accidental = 0;
  if (semis == 0 && letters == 0) {
    // Already rooted on C: pitch tokens stay exactly as written.
    TokenSeq out = seq;
    for (auto& t : out) {
      if (t.kind == TokenKind::Key) t.text = key_token(target);
    }
    return out;
  }
  const auto source_sig = key_signature(from);
  const auto target_sig = key_signature(target);

  // Accidentals in force for the rest of the bar, keyed by diatonic step.
  std::map<int, int> source_bar;
  std::map<int, int> target_bar;

  TokenSeq out;
  out.reserve(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const Token& t = seq[i];
    if (t.kind == TokenKind::Key) {
      out.push_back(Token{TokenKind::Key, key_token(target)});
      continue;
    }
    if (t.kind == TokenKind::Measure && is_barline(t.text)) {
      source_bar.clear();
      target_bar.clear();
      out.push_back(t);
      continue;
    }
    if (t.kind != TokenKind::Pitch || is_rest(t.text)) {
      out.push_back(t);
      continue;
    }
    const auto src = parse_pitch(t.text);
    if (!src) throw TranspositionError("malformed pitch token '" + t.text + "' at " + std::to_string(i));

    int src_acc = source_sig[static_cast<std::size_t>(src->letter)];
    if (src->accidental) {
      src_acc = *src->accidental;
      source_bar[src->step()] = src_acc;
    } else if (auto it = source_bar.find(src->step()); it != source_bar.end()) {
      src_acc = it->second;
    }
    const int sounding = src->natural_midi() + src_acc + semis;

    if (sounding < 0 || sounding > 127)
      throw TranspositionError("pitch '" + t.text + "' at " + std::to_string(i) + " out of range after transposition");

    // Keep the letter distance; a double accidental that would overflow moves to
    // the neighbouring letter instead.
    int step = src->step() + letters;
    PitchSpelling dst = spelling_at(step);
    int needed = sounding - dst.natural_midi();
    if (needed < -2 || needed > 2) {
      step += needed > 0 ? 1 : -1;
      dst = spelling_at(step);
      needed = sounding - dst.natural_midi();
    }
    if (needed < -2 || needed > 2)
      throw TranspositionError("cannot respell '" + t.text + "' at " + std::to_string(i));

    int implied = target_sig[static_cast<std::size_t>(dst.letter)];
    if (auto it = target_bar.find(step); it != target_bar.end()) implied = it->second;
    if (needed != implied) {
      dst.accidental = needed;
      target_bar[step] = needed;
    }
    out.push_back(Token{TokenKind::Pitch, format_pitch(dst)});
  }
  return out;
}

}  // namespace tunelab::abc
