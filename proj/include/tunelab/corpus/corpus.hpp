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
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "tunelab/abc/token.hpp"

namespace tunelab::corpus {

// One contributed setting from the data dump.
struct RawEntry {
  std::int64_t tune_id = 0;
  std::int64_t setting_id = 0;
  std::string title;
  std::string tune_type;
  std::string meter;
  std::string key_text;
  std::string abc_body;
  std::string date;
  std::string user;

  friend bool operator==(const RawEntry&, const RawEntry&) = default;
};

// Counts per reason. Every input record lands either in the output or in
// exactly one rejection bucket.
using Tally = std::map<std::string, std::size_t>;

std::size_t tally_total(const Tally& t);
// Two-column plain-text table followed by retained/input totals.
void write_tally(std::ostream& out, const Tally& rejections, std::size_t retained);

struct DumpParse {
  std::vector<RawEntry> entries;
  Tally rejected;
};

// Reads comma-separated records with optional double quoting ("" escapes a
// quote; quoted fields may span lines). A leading column-name row is skipped
// and tallied as "header row". Throws IoError if the stream cannot be read.
DumpParse parse_dump(std::istream& in);

// One record in dump format, ending with a newline.
std::string format_dump_record(const RawEntry& e);

// ---------------------------------------------------------------------------

struct CharCorpus {
  std::string text;
  std::size_t entry_count = 0;
  Tally rejected;
};

// Five fields per entry (T:, M:, L: 1/8, K:, body) and one blank line between
// entries.
CharCorpus build_char_corpus(const std::vector<RawEntry>& entries);

// Ornament-stripping counts, kept apart from rejections.
struct StripCounts {
  std::size_t ornaments = 0;    // ~ and {grace} groups
  std::size_t decorations = 0;  // staccato dots, slurs, !..! marks, chord symbols
  std::size_t titles = 0;       // T: lines inside the body
};

// Removes title lines, ornaments and decorations from a body. Tuplet marks stay.
std::string strip_ornaments(std::string_view body, StripCounts* counts = nullptr);

struct FilterResult {
  std::vector<RawEntry> entries;  // bodies cleaned
  Tally rejected;
  StripCounts stripped;
};

// Keeps entries with one meter, one key in a corpus mode, a single voice, a
// tokenizable body and at least `min_measures` bars once repeats are played out.
FilterResult filter_for_tokens(const std::vector<RawEntry>& entries, std::size_t min_measures = 7);

struct TokenCorpus {
  std::vector<abc::TokenSeq> transcriptions;
  Tally rejected;
};

// Tokenizes, transposes to root C and (optionally) writes out repeats.
TokenCorpus build_token_corpus(const std::vector<RawEntry>& entries, bool explicit_repeats);

// One transcription per line, tokens separated by single spaces.
void write_token_corpus(std::ostream& out, const std::vector<abc::TokenSeq>& transcriptions);
std::vector<abc::TokenSeq> read_token_corpus(std::istream& in);
// Like read_token_corpus but without classifying tokens (for generated files).
std::vector<std::vector<std::string>> read_token_lines(std::istream& in);

}  // namespace tunelab::corpus
