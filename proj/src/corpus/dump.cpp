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
#include <charconv>
#include <iomanip>
#include <iterator>
#include <sstream>

#include "tunelab/common/error.hpp"
#include "tunelab/corpus/corpus.hpp"

namespace tunelab::corpus {
namespace {

constexpr std::size_t kFieldCount = 9;

struct Record {
  std::vector<std::string> fields;
  bool malformed = false;  // stray quote or unterminated quoted field
};

// Splits the whole input into records. A record ends at a newline outside
// quotes; `\r\n` is accepted. Blank lines between records are ignored.
class RecordReader {
 public:
  explicit RecordReader(std::string text) : text_(std::move(text)) {}

  bool next(Record& rec) {
    while (pos_ < text_.size() && (text_[pos_] == '\n' || text_[pos_] == '\r')) ++pos_;
    if (pos_ >= text_.size()) return false;
    rec = Record{};
    std::string field;
    bool quoted = false;       // inside a quoted field
    bool was_quoted = false;   // current field began with a quote
    bool after_close = false;  // closing quote seen, expecting , or newline
    while (pos_ < text_.size()) {
      char c = text_[pos_++];
      if (quoted) {
        if (c != '"') {
          field += c;
        } else if (pos_ < text_.size() && text_[pos_] == '"') {
          field += '"';
          ++pos_;
        } else {
          quoted = false;
          after_close = true;
        }
        continue;
      }
      if (c == ',') {
        rec.fields.push_back(std::move(field));
        field.clear();
        was_quoted = after_close = false;
        continue;
      }
      if (c == '\n' || c == '\r') {
        if (c == '\r' && pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
        break;
      }
      if (c == '"' && field.empty() && !was_quoted) {
        quoted = was_quoted = true;
        continue;
      }
      // Text after a closing quote, or a bare quote inside an unquoted field.
      if (after_close || c == '"') rec.malformed = true;
      field += c;
    }
    if (quoted) rec.malformed = true;
    rec.fields.push_back(std::move(field));
    return true;
  }

 private:
  std::string text_;
  std::size_t pos_ = 0;
};

bool parse_id(const std::string& text, std::int64_t& out) {
  auto first = text.data();
  auto last = first + text.size();
  auto [p, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && p == last && out > 0;
}

bool blank(const std::string& s) {
  for (unsigned char c : s) {
    if (!std::isspace(c)) return false;
  }
  return true;
}

void quote_into(std::string& out, const std::string& field) {
  out += '"';
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

}  // namespace

std::size_t tally_total(const Tally& t) {
  std::size_t n = 0;
  for (const auto& [_, count] : t) n += count;
  return n;
}

void write_tally(std::ostream& out, const Tally& rejections, std::size_t retained) {
  std::size_t width = 8;
  for (const auto& [reason, _] : rejections) width = std::max(width, reason.size());
  auto row = [&](const std::string& label, std::size_t count) {
    out << std::left << std::setw(static_cast<int>(width) + 2) << label << std::right
        << std::setw(9) << count << '\n';
  };
  out << std::left << std::setw(static_cast<int>(width) + 2) << "reason" << std::right
      << std::setw(9) << "count" << '\n';
  out << std::string(width + 11, '-') << '\n';
  for (const auto& [reason, count] : rejections) row(reason, count);
  out << std::string(width + 11, '-') << '\n';
  row("retained", retained);
  row("input", retained + tally_total(rejections));
}

DumpParse parse_dump(std::istream& in) {
  if (!in) throw IoError("data dump stream is not readable");
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) throw IoError("failed reading data dump");

  DumpParse out;
  RecordReader reader(std::move(text));
  Record rec;
  bool first = true;
  while (reader.next(rec)) {
    bool is_first = first;
    first = false;
    if (rec.malformed) {
      ++out.rejected["malformed quoting"];
      continue;
    }
    if (rec.fields.size() != kFieldCount) {
      ++out.rejected["wrong field count"];
      continue;
    }
    RawEntry e;
    if (!parse_id(rec.fields[0], e.tune_id) || !parse_id(rec.fields[1], e.setting_id)) {
      ++out.rejected[is_first ? "header row" : "bad identifier"];
      continue;
    }
    e.title = std::move(rec.fields[2]);
    e.tune_type = std::move(rec.fields[3]);
    e.meter = std::move(rec.fields[4]);
    e.key_text = std::move(rec.fields[5]);
    e.abc_body = std::move(rec.fields[6]);
    e.date = std::move(rec.fields[7]);
    e.user = std::move(rec.fields[8]);
    if (blank(e.abc_body)) {
      ++out.rejected["empty body"];
      continue;
    }
    out.entries.push_back(std::move(e));
  }
  return out;
}

std::string format_dump_record(const RawEntry& e) {
  std::string out = std::to_string(e.tune_id) + ',' + std::to_string(e.setting_id);
  for (const auto* field : {&e.title, &e.tune_type, &e.meter, &e.key_text, &e.abc_body, &e.date, &e.user}) {
    out += ',';
    quote_into(out, *field);
  }
  out += '\n';
  return out;
}

}  // namespace tunelab::corpus
