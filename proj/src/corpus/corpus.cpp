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

#include <cctype>
#include <sstream>

#include "tunelab/abc/grammar.hpp"
#include "tunelab/abc/key.hpp"
#include "tunelab/abc/tokenizer.hpp"
#include "tunelab/abc/transpose.hpp"
#include "tunelab/corpus/corpus.hpp"
#include "tunelab/score/score.hpp"

namespace tunelab::corpus {
namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = nl + 1;
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_field_line(std::string_view line, char field) {
  line = trim(line);
  return line.size() >= 2 && line[0] == field && line[1] == ':';
}

bool has_field(std::string_view body, char field) {
  for (auto line : split_lines(body)) {
    if (is_field_line(line, field)) return true;
  }
  const char inline_field[] = {'[', field, ':', '\0'};
  return body.find(inline_field) != std::string_view::npos;
}

std::string_view reject_reason_for_key(std::string_view key_text, abc::KeySpec& key) {
  try {
    key = abc::parse_key(key_text);
  } catch (const ParseError&) {
    return "unparseable key";
  }
  if (!abc::is_corpus_mode(key.mode)) return "unsupported mode";
  return {};
}

bool brackets_balanced(const abc::TokenSeq& seq) {
  bool open = false;
  for (const auto& t : seq) {
    if (t.text == "[") {
      if (open) return false;
      open = true;
    } else if (t.text == "]") {
      if (!open) return false;
      open = false;
    }
  }
  return !open;
}

}  // namespace

CharCorpus build_char_corpus(const std::vector<RawEntry>& entries) {
  CharCorpus out;
  for (const auto& e : entries) {
    abc::KeySpec key;
    try {
      key = abc::parse_key(e.key_text);
    } catch (const ParseError&) {
      ++out.rejected["unparseable key"];
      continue;
    }
    std::string body;
    for (auto line : split_lines(e.abc_body)) {
      auto kept = trim(line);
      if (kept.empty()) continue;
      body.append(kept);
      body += '\n';
    }
    if (body.empty()) {
      ++out.rejected["empty body"];
      continue;
    }
    if (out.entry_count > 0) out.text += '\n';
    out.text += "T: " + e.title + "\nM: " + e.meter + "\nL: 1/8\nK: " + abc::key_name(key) + '\n';
    out.text += body;
    ++out.entry_count;
  }
  return out;
}

std::string strip_ornaments(std::string_view body, StripCounts* counts) {
  StripCounts local;
  StripCounts& c = counts ? *counts : local;
  std::string out;
  bool first_line = true;
  for (auto line : split_lines(body)) {
    if (is_field_line(line, 'T')) {
      ++c.titles;
      continue;
    }
    std::string kept;
    for (std::size_t i = 0; i < line.size(); ++i) {
      char ch = line[i];
      auto skip_to = [&](char close) {
        auto end = line.find(close, i + 1);
        i = end == std::string_view::npos ? line.size() : end;
      };
      if (ch == '%') {
        // Comment: keep as is, the tokenizer ignores it.
        kept.append(line.substr(i));
        break;
      }
      if (ch == '~') {
        ++c.ornaments;
      } else if (ch == '{') {
        ++c.ornaments;
        skip_to('}');
      } else if (ch == '"') {
        ++c.decorations;
        skip_to('"');
      } else if (ch == '!' || ch == '+') {
        ++c.decorations;
        skip_to(ch);
      } else if (ch == '.' || ch == ')') {
        ++c.decorations;
      } else if (ch == '(' && !(i + 1 < line.size() && std::isdigit(static_cast<unsigned char>(line[i + 1])))) {
        ++c.decorations;
      } else {
        kept += ch;
      }
    }
    if (!first_line) out += '\n';
    out += kept;
    first_line = false;
  }
  return out;
}

FilterResult filter_for_tokens(const std::vector<RawEntry>& entries, std::size_t min_measures) {
  FilterResult out;
  const std::string too_short = "fewer than " + std::to_string(min_measures) + " measures";
  for (const auto& e : entries) {
    if (trim(e.abc_body).empty()) {
      ++out.rejected["empty body"];
      continue;
    }
    if (has_field(e.abc_body, 'V')) {
      ++out.rejected["multiple voices"];
      continue;
    }
    if (has_field(e.abc_body, 'K') || has_field(e.abc_body, 'M')) {
      ++out.rejected["meter or key change"];
      continue;
    }
    abc::KeySpec key;
    if (auto reason = reject_reason_for_key(e.key_text, key); !reason.empty()) {
      ++out.rejected[std::string(reason)];
      continue;
    }
    StripCounts counts;
    std::string body = strip_ornaments(e.abc_body, &counts);
    abc::TokenSeq seq;
    try {
      seq = abc::tokenize_body(body, e.meter, key);
    } catch (const ParseError&) {
      ++out.rejected["untokenizable body"];
      continue;
    }
    std::size_t measures = 0;
    try {
      measures = score::count_measures(seq);
    } catch (const score::StructureError&) {
      ++out.rejected["unsupported repeat structure"];
      continue;
    }
    if (measures < min_measures) {
      ++out.rejected[too_short];
      continue;
    }
    out.stripped.ornaments += counts.ornaments;
    out.stripped.decorations += counts.decorations;
    out.stripped.titles += counts.titles;
    RawEntry kept = e;
    kept.abc_body = std::move(body);
    out.entries.push_back(std::move(kept));
  }
  return out;
}

TokenCorpus build_token_corpus(const std::vector<RawEntry>& entries, bool explicit_repeats) {
  TokenCorpus out;
  for (const auto& e : entries) {
    abc::KeySpec key;
    if (auto reason = reject_reason_for_key(e.key_text, key); !reason.empty()) {
      ++out.rejected[std::string(reason)];
      continue;
    }
    abc::TokenSeq seq;
    try {
      seq = abc::tokenize_body(e.abc_body, e.meter, key);
    } catch (const ParseError&) {
      ++out.rejected["untokenizable body"];
      continue;
    }
    try {
      seq = abc::transpose(seq, key);
    } catch (const Error&) {
      ++out.rejected["transposition failure"];
      continue;
    }
    if (explicit_repeats) {
      try {
        seq = score::expand_repeats(seq);
      } catch (const score::StructureError&) {
        ++out.rejected["unsupported repeat structure"];
        continue;
      }
    }
    if (!brackets_balanced(seq)) {
      ++out.rejected["unmatched chord bracket"];
      continue;
    }
    if (!abc::validate_grammar(seq).valid()) {
      ++out.rejected["grammar violation"];
      continue;
    }
    out.transcriptions.push_back(std::move(seq));
  }
  return out;
}

void write_token_corpus(std::ostream& out, const std::vector<abc::TokenSeq>& transcriptions) {
  for (const auto& seq : transcriptions) out << abc::format_tokens(seq) << '\n';
}

std::vector<abc::TokenSeq> read_token_corpus(std::istream& in) {
  std::vector<abc::TokenSeq> out;
  for (const auto& line : read_token_lines(in)) {
    abc::TokenSeq seq;
    seq.reserve(line.size());
    for (std::size_t i = 0; i < line.size(); ++i) {
      auto kind = abc::classify_token(line[i]);
      if (!kind) throw ParseError("unknown token '" + line[i] + "' in corpus line " + std::to_string(out.size() + 1), i);
      seq.push_back(abc::Token{*kind, line[i]});
    }
    out.push_back(std::move(seq));
  }
  return out;
}

std::vector<std::vector<std::string>> read_token_lines(std::istream& in) {
  if (!in) throw IoError("token corpus stream is not readable");
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = abc::split_tokens(line);
    if (!tokens.empty()) out.push_back(std::move(tokens));
  }
  return out;
}

}  // namespace tunelab::corpus
