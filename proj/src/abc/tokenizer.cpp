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

#include "tunelab/abc/tokenizer.hpp"

#include <cctype>
#include <optional>

#include "tunelab/abc/grammar.hpp"
#include "tunelab/abc/pitch.hpp"

namespace tunelab::abc {
namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::string duration_text(Rational r) {
  if (r.den() == 1) return std::to_string(r.num());
  if (r.num() == 1) return "/" + std::to_string(r.den());
  return r.str();
}

// Decoration letters of ABC 2.1 that may prefix a note.
bool is_decoration_letter(char c) {
  switch (c) {
    case 'T': case 'H': case 'L': case 'M': case 'O': case 'P': case 'S': case 'u': case 'v':
      return true;
    default:
      return false;
  }
}

class BodyLexer {
 public:
  BodyLexer(std::string_view body, Rational unit) : s_(body), scale_(unit / kTokenUnit) {}

  void run() {
    at_line_start_ = true;
    while (i_ < s_.size()) {
      const char c = s_[i_];
      if (c == '\n') {
        at_line_start_ = true;
        ++i_;
        continue;
      }
      if (is_space(c)) {
        ++i_;
        continue;
      }
      if (at_line_start_ && is_field_start(i_)) {
        field_line();
        continue;
      }
      at_line_start_ = false;
      step(c);
    }
    if (in_chord_) fail("unterminated chord", s_.size());
    if (pending_broken_) fail("broken rhythm without a following note", s_.size());
  }

  std::vector<Token> tokens() const {
    std::vector<Token> out;
    for (const auto& item : items_) {
      switch (item.type) {
        case ItemType::Plain:
          out.push_back(item.token);
          break;
        case ItemType::Note:
        case ItemType::ChordClose:
          out.push_back(item.token);
          if (item.length != Rational(1))
            out.push_back(Token{TokenKind::Duration, duration_text(item.length)});
          break;
      }
    }
    return out;
  }

 private:
  enum class ItemType { Plain, Note, ChordClose };
  struct Item {
    ItemType type;
    Token token;
    Rational length{1};
    bool in_chord = false;
  };

  [[noreturn]] void fail(const std::string& what, std::size_t pos) const { throw TokenizeError(what, pos); }

  bool is_field_start(std::size_t pos) const {
    return pos + 1 < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos])) && s_[pos + 1] == ':' &&
           !(pos + 2 < s_.size() && s_[pos + 2] == '|');
  }

  void apply_field(char name, std::string_view value, std::size_t pos) {
    switch (name) {
      case 'K': fail("key change inside body", pos);
      case 'M': fail("meter change inside body", pos);
      case 'V': fail("multiple voices are not supported", pos);
      case 'L': scale_ = parse_unit(value) / kTokenUnit; break;
      default: break;  // titles, parts, notes, words
    }
  }

  void field_line() {
    const std::size_t pos = i_;
    const char name = s_[i_];
    std::size_t end = s_.find('\n', i_);
    if (end == std::string_view::npos) end = s_.size();
    apply_field(name, s_.substr(i_ + 2, end - i_ - 2), pos);
    i_ = end;
  }

  void skip_until(char close, const char* what) {
    const std::size_t pos = i_;
    const auto end = s_.find(close, i_ + 1);
    if (end == std::string_view::npos) fail(std::string("unterminated ") + what, pos);
    i_ = end + 1;
  }

  void step(char c) {
    switch (c) {
      case '%': {
        const auto end = s_.find('\n', i_);
        i_ = end == std::string_view::npos ? s_.size() : end;
        return;
      }
      case '"': return skip_until('"', "annotation");
      case '!': return skip_until('!', "decoration");
      case '+': return skip_until('+', "decoration");
      case '{': return skip_until('}', "grace group");
      case '~': case '.': case '-': case ')': case '\\': case '`': case 'y': case '$':
        ++i_;
        return;
      case '(': return paren();
      case '>': case '<': return broken_rhythm(c);
      case '|': case ':': return barline();
      case '[': return open_bracket();
      case ']': return close_bracket();
      default: break;
    }
    if (c == '^' || c == '_' || c == '=' || letter_index(c) >= 0) return note();
    if (c == 'z' || c == 'x') return rest();
    if (is_decoration_letter(c)) {
      ++i_;
      return;
    }
    fail(std::string("unexpected character '") + c + "'", i_);
  }

  void paren() {
    if (i_ + 1 < s_.size() && is_digit(s_[i_ + 1])) {
      const std::size_t pos = i_;
      ++i_;
      std::string digits;
      while (i_ < s_.size() && is_digit(s_[i_])) digits += s_[i_++];
      // (p:q:r forms keep only p.
      while (i_ < s_.size() && (s_[i_] == ':' || is_digit(s_[i_]))) ++i_;
      if (digits.size() > 1 || digits[0] < '2') fail("unsupported tuplet (" + digits, pos);
      push_plain(TokenKind::Grouping, "(" + digits);
      return;
    }
    ++i_;  // slur
  }

  // Reads an ABC length suffix and returns it in token units.
  Rational read_length() {
    std::int64_t num = 1;
    std::int64_t den = 1;
    const std::size_t pos = i_;
    if (i_ < s_.size() && is_digit(s_[i_])) {
      num = 0;
      while (i_ < s_.size() && is_digit(s_[i_])) num = num * 10 + (s_[i_++] - '0');
    }
    while (i_ < s_.size() && s_[i_] == '/') {
      ++i_;
      if (i_ < s_.size() && is_digit(s_[i_])) {
        std::int64_t d = 0;
        while (i_ < s_.size() && is_digit(s_[i_])) d = d * 10 + (s_[i_++] - '0');
        if (d == 0) fail("zero length denominator", pos);
        den *= d;
      } else {
        den *= 2;
      }
    }
    if (num == 0) fail("zero note length", pos);
    return Rational(num, den) * scale_;
  }

  void note() {
    const std::size_t start = i_;
    while (i_ < s_.size() && (s_[i_] == '^' || s_[i_] == '_' || s_[i_] == '=')) ++i_;
    if (i_ >= s_.size() || letter_index(s_[i_]) < 0 || (s_[i_] > 'G' && s_[i_] < 'a'))
      fail("accidental without a note", start);
    ++i_;
    while (i_ < s_.size() && (s_[i_] == '\'' || s_[i_] == ',')) ++i_;
    const auto spelling = parse_pitch(s_.substr(start, i_ - start));
    if (!spelling) fail("malformed pitch", start);
    push_note(format_pitch(*spelling));
  }

  void rest() {
    ++i_;
    push_note("z");
  }

  void push_note(std::string text) {
    Item item{ItemType::Note, Token{TokenKind::Pitch, std::move(text)}, read_length(), in_chord_};
    if (!in_chord_) apply_pending(item);
    items_.push_back(std::move(item));
  }

  void apply_pending(Item& item) {
    if (pending_broken_) {
      item.length *= *pending_broken_;
      pending_broken_.reset();
    }
  }

  void broken_rhythm(char c) {
    const std::size_t pos = i_;
    int n = 0;
    while (i_ < s_.size() && s_[i_] == c) {
      ++n;
      ++i_;
    }
    if (n > 3) fail("broken rhythm too long", pos);
    const Rational small(1, std::int64_t{1} << n);
    const Rational large = Rational(2) - small;
    Item* prev = nullptr;
    for (auto it = items_.rbegin(); it != items_.rend(); ++it) {
      if (it->type == ItemType::ChordClose || (it->type == ItemType::Note && !it->in_chord)) {
        prev = &*it;
        break;
      }
      if (it->type == ItemType::Plain) break;
    }
    if (prev == nullptr || in_chord_ || pending_broken_) fail("broken rhythm without a preceding note", pos);
    prev->length *= (c == '>') ? large : small;
    pending_broken_ = (c == '>') ? small : large;
  }

  void emit_measure(const std::string& text) {
    if (!items_.empty() && items_.back().type == ItemType::Plain && is_barline(items_.back().token.text)) {
      auto& prev = items_.back().token.text;
      if (text == "|") return;
      if (prev == "|") {
        prev = text;
        return;
      }
    }
    push_plain(TokenKind::Measure, text);
  }

  void push_plain(TokenKind kind, std::string text) {
    items_.push_back(Item{ItemType::Plain, Token{kind, std::move(text)}});
  }

  // Reads a variant-ending number at the cursor ("1", "1,3", "1-2"), if any.
  std::optional<char> variant_number() {
    std::size_t j = i_;
    if (j < s_.size() && s_[j] == '[' && j + 1 < s_.size() && is_digit(s_[j + 1])) ++j;
    if (j >= s_.size() || !is_digit(s_[j]) || s_[j] == '0') return std::nullopt;
    const char digit = s_[j];
    ++j;
    while (j < s_.size() && (is_digit(s_[j]) || ((s_[j] == ',' || s_[j] == '-') && j + 1 < s_.size() &&
                                                  is_digit(s_[j + 1]))))
      ++j;
    i_ = j;
    return digit;
  }

  void barline() {
    const std::size_t pos = i_;
    std::string run;
    while (i_ < s_.size()) {
      const char c = s_[i_];
      if (c == ':' || c == '|') {
        run += c;
      } else if (c == ']' && !run.empty() && run.back() == '|' && !in_chord_) {
        // thick closing bar
      } else {
        break;
      }
      ++i_;
    }
    if (in_chord_) fail("barline inside chord", pos);
    finish_barline(run, pos);
  }

  void finish_barline(const std::string& run, std::size_t pos) {
    const bool has_bar = run.find('|') != std::string::npos;
    std::size_t lead = 0;
    while (lead < run.size() && run[lead] == ':') ++lead;
    std::size_t trail = 0;
    while (trail < run.size() && run[run.size() - 1 - trail] == ':') ++trail;
    if (!has_bar) {
      if (run.size() < 2) fail("stray ':'", pos);
      emit_measure(":|");
      emit_measure("|:");
      return;
    }
    if (lead > 0) emit_measure(":|");
    if (trail > 0) {
      emit_measure("|:");
      return;
    }
    if (auto digit = variant_number()) {
      emit_measure(std::string("|") + *digit);
    } else if (lead == 0) {
      emit_measure("|");
    }
  }

  void open_bracket() {
    const std::size_t pos = i_;
    if (i_ + 1 < s_.size() && s_[i_ + 1] == '|') {
      ++i_;
      barline();
      return;
    }
    if (i_ + 1 < s_.size() && is_digit(s_[i_ + 1])) {
      if (auto digit = variant_number()) {
        emit_measure(std::string("|") + *digit);
        return;
      }
    }
    if (i_ + 2 < s_.size() && std::isalpha(static_cast<unsigned char>(s_[i_ + 1])) && s_[i_ + 2] == ':') {
      const auto end = s_.find(']', i_);
      if (end == std::string_view::npos) fail("unterminated inline field", pos);
      apply_field(s_[i_ + 1], s_.substr(i_ + 3, end - i_ - 3), pos);
      i_ = end + 1;
      return;
    }
    if (in_chord_) fail("nested chord", pos);
    ++i_;
    in_chord_ = true;
    push_plain(TokenKind::Measure, "[");
  }

  void close_bracket() {
    ++i_;
    in_chord_ = false;
    Item item{ItemType::ChordClose, Token{TokenKind::Measure, "]"}, read_length()};
    apply_pending(item);
    items_.push_back(std::move(item));
  }

  std::string_view s_;
  Rational scale_;
  std::size_t i_ = 0;
  bool at_line_start_ = true;
  bool in_chord_ = false;
  std::optional<Rational> pending_broken_;
  std::vector<Item> items_;
};

bool needs_space(const Token& prev, const Token& next) {
  const bool prev_bar = is_barline(prev.text);
  if (prev_bar && (is_barline(next.text) || next.text == "]" || next.text == "[")) return true;
  if (prev.text == "[" && next.kind != TokenKind::Pitch) return true;
  return false;
}

}  // namespace

std::string meter_token(std::string_view meter) {
  std::string compact;
  for (char c : meter)
    if (!is_space(c)) compact += c;
  std::string text = "M:" + compact;
  if (classify_token(text) != TokenKind::Meter) throw TokenizeError("unsupported meter '" + compact + "'", 0);
  return text;
}

Rational meter_length(std::string_view text) {
  if (text.starts_with("M:")) text.remove_prefix(2);
  if (text == "C" || text == "C|") return Rational(1);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) throw ParseError("malformed meter '" + std::string(text) + "'", 0);
  return Rational(std::stoll(std::string(text.substr(0, slash))), std::stoll(std::string(text.substr(slash + 1))));
}

Rational parse_unit(std::string_view text) {
  std::string compact;
  for (char c : text)
    if (!is_space(c)) compact += c;
  const auto slash = compact.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(compact));
    const auto num = std::stoll(compact.substr(0, slash));
    const auto den = std::stoll(compact.substr(slash + 1));
    if (num <= 0 || den <= 0) throw ParseError("non-positive unit length", 0);
    return Rational(num, den);
  } catch (const std::logic_error&) {
    throw ParseError("malformed unit length '" + compact + "'", 0);
  }
}

TokenSeq tokenize_body(std::string_view body, std::string_view meter, const KeySpec& key, Rational unit) {
  TokenSeq seq;
  seq.push_back(Token{TokenKind::Transcription, std::string(kStartToken)});
  seq.push_back(Token{TokenKind::Meter, meter_token(meter)});
  seq.push_back(Token{TokenKind::Key, key_token(key)});
  BodyLexer lexer(body, unit);
  lexer.run();
  for (auto& t : lexer.tokens()) seq.push_back(std::move(t));
  seq.push_back(Token{TokenKind::Transcription, std::string(kEndToken)});
  return seq;
}

std::string detokenize_body(const TokenSeq& seq) {
  std::string out;
  int bars_on_line = 0;
  const Token* prev = nullptr;
  for (const auto& t : seq) {
    if (t.kind == TokenKind::Transcription || t.kind == TokenKind::Meter || t.kind == TokenKind::Key) continue;
    if (prev != nullptr) {
      if ((prev->text == "|" || prev->text == ":|") && bars_on_line >= 4 && !is_barline(t.text)) {
        out += '\n';
        bars_on_line = 0;
      } else if (needs_space(*prev, t)) {
        out += ' ';
      }
    }
    out += t.text;
    if (is_barline(t.text)) ++bars_on_line;
    prev = &t;
  }
  return out;
}

std::string detokenize(const TokenSeq& seq) {
  const auto report = validate_grammar(seq);
  if (!report.valid()) throw Error("cannot detokenize an invalid sequence: " + report.violations.front().message);
  std::string out = "X: 1\n";
  out += "M: " + seq[1].text.substr(2) + "\n";
  out += "L: 1/8\n";
  out += "K: " + seq[2].text.substr(2) + "\n";
  out += detokenize_body(seq);
  out += "\n";
  return out;
}

std::vector<AbcTune> parse_abc(std::string_view text) {
  std::vector<AbcTune> tunes;
  AbcTune current;
  bool in_body = false;
  bool have_tune = false;
  auto flush = [&] {
    if (have_tune) {
      while (!current.body.empty() && (current.body.back() == '\n' || current.body.back() == ' ')) current.body.pop_back();
      tunes.push_back(std::move(current));
    }
    current = AbcTune{};
    in_body = false;
    have_tune = false;
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;

    std::size_t first = 0;
    while (first < line.size() && is_space(line[first])) ++first;
    const std::string_view trimmed = line.substr(first);
    const bool blank = trimmed.empty();
    const bool field = trimmed.size() >= 2 && std::isalpha(static_cast<unsigned char>(trimmed[0])) &&
                       trimmed[1] == ':' && !(trimmed.size() > 2 && trimmed[2] == '|');

    if (blank) {
      if (in_body) flush();
      if (end == text.size()) break;
      continue;
    }
    if (field && trimmed[0] == 'X') {
      flush();
      have_tune = true;
      continue;
    }
    if (!in_body && field) {
      have_tune = true;
      std::string value(trimmed.substr(2));
      while (!value.empty() && is_space(value.front())) value.erase(value.begin());
      while (!value.empty() && is_space(value.back())) value.pop_back();
      switch (trimmed[0]) {
        case 'T': if (current.title.empty()) current.title = value; break;
        case 'M': current.meter = value; break;
        case 'L': current.unit = value; break;
        case 'K': current.key = value; in_body = true; break;
        default: break;
      }
      continue;
    }
    have_tune = true;
    in_body = true;
    current.body += line;
    current.body += '\n';
    if (end == text.size()) break;
  }
  flush();
  return tunes;
}

TokenSeq tokenize_abc(std::string_view text) {
  const auto tunes = parse_abc(text);
  if (tunes.empty()) throw TokenizeError("no tune found", 0);
  const auto& tune = tunes.front();
  return tokenize_body(tune.body, tune.meter, parse_key(tune.key), parse_unit(tune.unit));
}

}  // namespace tunelab::abc
