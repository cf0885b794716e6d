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

// Independent reference implementations used as test oracles. None of these
// call into the library code they check.

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace tunelab::testing {

struct OraclePitch {
  int letter = 0;  // C=0 .. B=6
  int octave_steps = 0;
  std::optional<int> accidental;
};

inline int letter_of(char c) {
  static const std::string kLetters = "CDEFGAB";
  char upper = (c >= 'a' && c <= 'g') ? static_cast<char>(c - 'a' + 'A') : c;
  return static_cast<int>(kLetters.find(upper));
}

inline OraclePitch oracle_parse_pitch(const std::string& text) {
  OraclePitch p;
  std::size_t i = 0;
  int acc = 0;
  bool has_acc = false;
  while (i < text.size() && (text[i] == '^' || text[i] == '_' || text[i] == '=')) {
    has_acc = true;
    acc += text[i] == '^' ? 1 : text[i] == '_' ? -1 : 0;
    ++i;
  }
  if (has_acc) p.accidental = acc;
  char c = text[i++];
  p.letter = letter_of(c);
  int octave = (c >= 'a') ? 1 : 0;
  for (; i < text.size(); ++i) octave += text[i] == '\'' ? 1 : -1;
  p.octave_steps = octave;
  return p;
}

// Accidentals of the seven letters for a key, built by walking the mode's
// scale from the root rather than counting fifths.
inline std::array<int, 7> oracle_signature(const std::string& key_token) {
  static const std::array<int, 7> kNatural = {0, 2, 4, 5, 7, 9, 11};
  static const std::map<std::string, std::array<int, 7>> kScales = {
      {"maj", {0, 2, 4, 5, 7, 9, 11}}, {"min", {0, 2, 3, 5, 7, 8, 10}},
      {"dor", {0, 2, 3, 5, 7, 9, 10}}, {"mix", {0, 2, 4, 5, 7, 9, 10}},
      {"lyd", {0, 2, 4, 6, 7, 9, 11}}, {"phr", {0, 1, 3, 5, 7, 8, 10}},
      {"loc", {0, 1, 3, 5, 6, 8, 10}}};
  std::string body = key_token.substr(2);
  int root_letter = letter_of(body[0]);
  std::size_t pos = 1;
  int root_acc = 0;
  if (pos < body.size() && (body[pos] == '#' || body[pos] == 'b')) {
    root_acc = body[pos] == '#' ? 1 : -1;
    ++pos;
  }
  const auto& scale = kScales.at(body.substr(pos));
  int root_pc = kNatural[root_letter] + root_acc;
  std::array<int, 7> sig{};
  for (int degree = 0; degree < 7; ++degree) {
    int letter = (root_letter + degree) % 7;
    int pc = ((root_pc + scale[degree]) % 12 + 12) % 12;
    int diff = ((pc - kNatural[letter]) % 12 + 12) % 12;
    if (diff > 6) diff -= 12;
    sig[letter] = diff;
  }
  return sig;
}

inline bool oracle_is_barline(const std::string& t) {
  return t == "|" || t == "|:" || t == ":|" || (t.size() == 2 && t[0] == '|' && t[1] >= '1' && t[1] <= '9');
}

// Sounding MIDI numbers of the pitch tokens in order (rests skipped). The key
// is read from the third token.
inline std::vector<int> oracle_sounding(const std::vector<std::string>& texts) {
  static const std::array<int, 7> kNatural = {0, 2, 4, 5, 7, 9, 11};
  auto sig = oracle_signature(texts.at(2));
  std::map<std::pair<int, int>, int> bar;
  std::vector<int> out;
  for (std::size_t i = 3; i < texts.size(); ++i) {
    const auto& t = texts[i];
    if (oracle_is_barline(t)) {
      bar.clear();
      continue;
    }
    char first = t.empty() ? ' ' : t[0];
    bool pitch = first == '^' || first == '_' || first == '=' || (first >= 'A' && first <= 'G') ||
                 (first >= 'a' && first <= 'g');
    if (!pitch) continue;
    auto p = oracle_parse_pitch(t);
    std::pair<int, int> slot{p.letter, p.octave_steps};
    int acc = sig[p.letter];
    if (p.accidental) {
      bar[slot] = *p.accidental;
      acc = *p.accidental;
    } else if (auto it = bar.find(slot); it != bar.end()) {
      acc = it->second;
    }
    out.push_back(60 + 12 * p.octave_steps + kNatural[p.letter] + acc);
  }
  return out;
}

// Plays `|: ... :|` sections out as plain text, dropping every barline. Only
// handles sequences without variant endings.
inline std::vector<std::string> oracle_expand(const std::vector<std::string>& texts) {
  std::vector<std::string> out;
  std::vector<std::string> section;
  for (const auto& t : texts) {
    if (t == "<s>" || t == "<\\s>" || t.rfind("M:", 0) == 0 || t.rfind("K:", 0) == 0) continue;
    if (t == "|:") {
      out.insert(out.end(), section.begin(), section.end());
      section.clear();
    } else if (t == ":|") {
      out.insert(out.end(), section.begin(), section.end());
      out.insert(out.end(), section.begin(), section.end());
      section.clear();
    } else if (t != "|") {
      section.push_back(t);
    }
  }
  out.insert(out.end(), section.begin(), section.end());
  return out;
}

// CSV record writer written independently of the library's.
inline std::string oracle_csv_record(const std::vector<std::string>& fields, const std::vector<bool>& quote) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ",";
    if (!quote[i]) {
      out += fields[i];
      continue;
    }
    out += "\"";
    for (char c : fields[i]) out += (c == '"') ? std::string("\"\"") : std::string(1, c);
    out += "\"";
  }
  return out + "\r\n";
}

}  // namespace tunelab::testing
