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

#include <doctest.h>

#include <set>

#include "support/gen.hpp"
#include "support/oracles.hpp"
#include "tunelab/abc/grammar.hpp"
#include "tunelab/abc/key.hpp"
#include "tunelab/abc/pitch.hpp"
#include "tunelab/abc/tokenizer.hpp"
#include "tunelab/abc/transpose.hpp"
#include "tunelab/abc/vocabulary.hpp"
#include "tunelab/score/score.hpp"

using namespace tunelab;
using namespace tunelab::abc;

namespace {

const char* kBody3038 =
    "|:eA (3AAA g2 fg|eA (3AAA BGGf|eA (3AAA g2 fg|1afge d2 gf:|2afge d2 cd||\n"
    "|:eaag efgf|eaag edBd|eaag efge|afge dgfg:|";
const char* kBody21045 =
    "eAAa g2fg|eAA2 BGBd|eAA2 g2fg|1af (3gfe dGG2:|2af (3gfe d2^cd||\n"
    "eaag efgf|eaag ed (3Bcd|eaag efgb|af (3gfe d2^cd:|";

const char* kTokens3038 =
    "<s> M:4/4 K:Cmix |: g c (3 c c c b 2 a b | g c (3 c c c d B B a | g c (3 "
    "c c c b 2 a b |1 c' a b g f 2 b a :| |2 c' a b g f 2 e f |: g c' c' b g "
    "a b a | g c' c' b g f d f | g c' c' b g a b g | c' a b g f b a b :| <\\s>";
const char* kTokens21045 =
    "<s> M:4/4 K:Cdor g c c c' b 2 a b | g c c 2 d B d f | g c c 2 b 2 a b |1 "
    "c' a (3 b a g f B B 2 :| |2 c' a (3 b a g f 2 =e f | g c' c' b g a b a | g "
    "c' c' b g f (3 d e f | g c' c' b g a b d' | c' a (3 b a g f 2 =e f :| <\\s>";

std::vector<std::string> texts_of(const TokenSeq& seq) {
  std::vector<std::string> out;
  for (const auto& t : seq) out.push_back(t.text);
  return out;
}

}  // namespace

TEST_CASE("parse_key reads long and short names") {
  auto amix = parse_key("Amixolydian");
  CHECK(amix.root == 9);
  CHECK(amix.mode == Mode::Mixolydian);
  auto ador = parse_key("Ador");
  CHECK(ador.root == 9);
  CHECK(ador.mode == Mode::Dorian);
  CHECK(parse_key("Cmaj").root == 0);
  CHECK(parse_key("K:Cmin").mode == Mode::Minor);
  CHECK(parse_key("G").mode == Mode::Major);
  CHECK(parse_key("F#m").root == 6);
  CHECK(parse_key("Bb major").root == 10);
  CHECK_THROWS_AS(parse_key("Hmaj"), ParseError);
  CHECK_THROWS_AS(parse_key("Aquixotic"), ParseError);
  CHECK_THROWS_AS(parse_key(""), ParseError);
}

TEST_CASE("key signatures agree with a scale-walk oracle") {
  for (const char* root : {"C", "D", "E", "F", "G", "A", "B", "F#", "C#", "Bb", "Eb", "Ab", "Db", "Gb"}) {
    for (const char* mode : {"maj", "min", "dor", "mix", "lyd", "phr", "loc"}) {
      std::string token = std::string("K:") + root + mode;
      auto key = parse_key(token);
      auto expected = testing::oracle_signature(token);
      CHECK_MESSAGE(key_signature(key) == expected, token);
    }
  }
}

TEST_CASE("shift to C lies in -5..+6 and lands on root C") {
  for (int root = 0; root < 12; ++root) {
    KeySpec k;
    k.root = root;
    int s = shift_to_c(k);
    CHECK(s >= -5);
    CHECK(s <= 6);
    CHECK(((root + s) % 12 + 12) % 12 == 0);
  }
  CHECK(shift_to_c(parse_key("Amix")) == 3);
  CHECK(shift_to_c(parse_key("F#min")) == 6);
}

TEST_CASE("token classification") {
  CHECK(classify_token("M:3/4") == TokenKind::Meter);
  CHECK(classify_token("K:Cmaj") == TokenKind::Key);
  CHECK(classify_token(":|") == TokenKind::Measure);
  CHECK(classify_token("|1") == TokenKind::Measure);
  CHECK(classify_token("C") == TokenKind::Pitch);
  CHECK(classify_token("^c'") == TokenKind::Pitch);
  CHECK(classify_token("(3") == TokenKind::Grouping);
  CHECK(classify_token("2") == TokenKind::Duration);
  CHECK(classify_token("/2") == TokenKind::Duration);
  CHECK(classify_token("<s>") == TokenKind::Transcription);
  CHECK(classify_token("<\\s>") == TokenKind::Transcription);
  CHECK_FALSE(classify_token("c,"));   // lowercase takes no comma
  CHECK_FALSE(classify_token("C'"));   // uppercase takes no apostrophe
  CHECK_FALSE(classify_token("H"));
  CHECK_FALSE(classify_token(""));
}

TEST_CASE("tokenizing and transposing the two settings reproduces the listings") {
  auto s3038 = transpose(tokenize_body(kBody3038, "4/4", parse_key("Amixolydian")), parse_key("Amixolydian"));
  CHECK(format_tokens(s3038) == kTokens3038);
  auto s21045 = transpose(tokenize_body(kBody21045, "4/4", parse_key("Adorian")), parse_key("Adorian"));
  CHECK(format_tokens(s21045) == kTokens21045);
  CHECK(validate_grammar(s3038).valid());
  CHECK(validate_grammar(s21045).valid());
}

TEST_CASE("respelling cases from the listings") {
  auto amix = parse_key("Amix");
  auto out = transpose(parse_tokens("<s> M:4/4 K:Amix e A (3 A A A g 2 f g <\\s>"), amix);
  CHECK(format_tokens(out) == "<s> M:4/4 K:Cmix g c (3 c c c b 2 a b <\\s>");
  auto ador = parse_key("Ador");
  out = transpose(parse_tokens("<s> M:4/4 K:Ador d 2 ^c d <\\s>"), ador);
  CHECK(format_tokens(out) == "<s> M:4/4 K:Cdor f 2 =e f <\\s>");
}

TEST_CASE("tokenize_body edge cases") {
  CHECK(format_tokens(tokenize_body("|", "4/4", parse_key("Cmaj"))) == "<s> M:4/4 K:Cmaj | <\\s>");
  CHECK(format_tokens(tokenize_body("a>b c<d", "4/4", parse_key("C"))) ==
        "<s> M:4/4 K:Cmaj a 3/2 b /2 c /2 d 3/2 <\\s>");
  CHECK(format_tokens(tokenize_body("[ceg]2 z/ a3/2", "6/8", parse_key("C"))) ==
        "<s> M:6/8 K:Cmaj [ c e g ] 2 z /2 a 3/2 <\\s>");
  CHECK(format_tokens(tokenize_body("~A.B {g}c !trill!d \"Am\"e (fg) a-|a", "4/4", parse_key("C"))) ==
        "<s> M:4/4 K:Cmaj A B c d e f g a | a <\\s>");
  // L: 1/16 halves every duration.
  CHECK(format_tokens(tokenize_body("L:1/16\nA2 B", "4/4", parse_key("C"))) == "<s> M:4/4 K:Cmaj A B /2 <\\s>");
  CHECK_THROWS_AS(tokenize_body("A B # C", "4/4", parse_key("C")), TokenizeError);
  CHECK_THROWS_AS(tokenize_body("A B\nK:G\nc", "4/4", parse_key("C")), TokenizeError);
  try {
    tokenize_body("AB&C", "4/4", parse_key("C"));
    FAIL("expected a tokenize error");
  } catch (const TokenizeError& e) {
    CHECK(e.position() == 2);
  }
}

TEST_CASE("transposition from root C leaves pitches unchanged") {
  CounterRng rng(11);
  for (int i = 0; i < 200; ++i) {
    auto seq = testing::random_tokens(rng, true);
    auto key = parse_key(seq[2].text);
    CHECK(transpose(seq, key) == seq);
  }
}

TEST_CASE("transposition shifts sounding pitch by the fixed amount") {
  CounterRng rng(12);
  for (int i = 0; i < 300; ++i) {
    auto seq = testing::random_tokens(rng, false);
    auto key = parse_key(seq[2].text);
    auto out = transpose(seq, key);
    int s = shift_to_c(key);
    auto before = testing::oracle_sounding(texts_of(seq));
    auto after = testing::oracle_sounding(texts_of(out));
    REQUIRE(before.size() == after.size());
    for (auto& p : before) p += s;
    CHECK(before == after);
    // The library's own note events agree with the oracle.
    auto events_in = score::to_note_events(seq);
    auto events_out = score::to_note_events(out);
    REQUIRE(events_in.size() == events_out.size());
    for (std::size_t k = 0; k < events_in.size(); ++k) {
      CHECK(events_in[k].onset == events_out[k].onset);
      if (events_in[k].pitch) CHECK(*events_in[k].pitch + s == *events_out[k].pitch);
    }
    // Kind- and length-preserving; non-pitch tokens untouched except the key.
    REQUIRE(out.size() == seq.size());
    for (std::size_t k = 0; k < seq.size(); ++k) {
      CHECK(out[k].kind == seq[k].kind);
      if (k != 2 && seq[k].kind != TokenKind::Pitch) CHECK(out[k].text == seq[k].text);
    }
    CHECK(out[2].text.substr(0, 3) == "K:C");
  }
}

TEST_CASE("accidentals persist to the end of the bar only, per octave") {
  auto events = score::to_note_events(parse_tokens("<s> M:4/4 K:Cmaj ^c c C | c <\\s>"));
  REQUIRE(events.size() == 4);
  CHECK(*events[0].pitch == 73);
  CHECK(*events[1].pitch == 73);
  CHECK(*events[2].pitch == 60);
  CHECK(*events[3].pitch == 72);
  auto oracle = testing::oracle_sounding({"<s>", "M:4/4", "K:Cmaj", "^c", "c", "C", "|", "c", "<\\s>"});
  CHECK(oracle == std::vector<int>{73, 73, 60, 72});
}

TEST_CASE("transposition past the octave range fails") {
  // g'''' is MIDI 127; four semitones up leaves the MIDI range.
  auto seq = parse_tokens("<s> M:4/4 K:Abmaj g'''' <\\s>");
  CHECK_THROWS_AS(transpose(seq, parse_key("Abmaj")), TranspositionError);
}

TEST_CASE("detokenize examples") {
  auto text = detokenize(parse_tokens("<s> M:4/4 K:Cmaj C 2 | <\\s>"));
  CHECK(text == "X: 1\nM: 4/4\nL: 1/8\nK: Cmaj\nC2|\n");
  CHECK_THROWS_AS(detokenize(parse_tokens("<s> K:Cmaj M:4/4 C <\\s>")), Error);
  for (const char* listing : {kTokens3038, kTokens21045}) {
    auto seq = parse_tokens(listing);
    CHECK(tokenize_abc(detokenize(seq)) == seq);
  }
}

TEST_CASE("detokenize then tokenize is a fixed point on generated sequences") {
  CounterRng rng(13);
  for (int i = 0; i < 500; ++i) {
    auto seq = testing::random_tokens(rng, i % 2 == 0);
    REQUIRE(validate_grammar(seq).valid());
    auto back = tokenize_abc(detokenize(seq));
    CHECK_MESSAGE(back == seq, format_tokens(seq));
  }
}

TEST_CASE("tokenize then detokenize keeps canonical ABC text") {
  const char* abc = "X: 1\nM: 6/8\nL: 1/8\nK: Cdor\n|:G2c c2d|e3 d2c:|\n";
  auto squeeze = [](std::string s) {
    std::erase_if(s, [](char c) { return c == ' '; });
    return s;
  };
  CHECK(squeeze(detokenize(tokenize_abc(abc))) == squeeze(abc));
}

TEST_CASE("grammar violations") {
  auto report = validate_grammar(parse_tokens("<s> K:Cmaj M:4/4 C D | <\\s>"));
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].kind == ViolationKind::MisorderedHeader);

  std::vector<std::string> unknown = {"<s>", "M:4/4", "K:Cmaj", "C", "Q", "<\\s>"};
  auto r2 = validate_grammar(std::span<const std::string>(unknown));
  REQUIRE(r2.violations.size() == 1);
  CHECK(r2.violations[0].kind == ViolationKind::UnknownToken);
  CHECK(r2.violations[0].position == 4);

  CHECK_FALSE(validate_grammar(parse_tokens("<s> M:4/4 K:Cmaj | 2 C <\\s>")).valid());
  CHECK_FALSE(validate_grammar(parse_tokens("<s> M:4/4 K:Cmaj C D")).valid());
  CHECK(validate_grammar(parse_tokens("<s> M:4/4 K:Cmaj [ C E ] 2 (3 C D E <\\s>")).valid());
}

TEST_CASE("deleting a header or terminal token is always reported") {
  CounterRng rng(14);
  for (int i = 0; i < 200; ++i) {
    auto texts = texts_of(testing::random_tokens(rng));
    for (std::size_t drop : {std::size_t{0}, std::size_t{1}, std::size_t{2}, texts.size() - 1}) {
      auto copy = texts;
      copy.erase(copy.begin() + static_cast<std::ptrdiff_t>(drop));
      CHECK_FALSE(validate_grammar(std::span<const std::string>(copy)).valid());
    }
  }
}

TEST_CASE("vocabulary") {
  auto v = build_token_vocabulary({split_tokens("<s> M:4/4 K:Cmaj C | <\\s>")});
  CHECK(v.size() == 6);
  CHECK_THROWS(build_token_vocabulary({}));
  CHECK_THROWS(build_char_vocabulary(""));

  CounterRng rng(15);
  std::vector<std::vector<std::string>> corpus;
  std::set<std::string> oracle;
  for (int i = 0; i < 100; ++i) {
    corpus.push_back(texts_of(testing::random_tokens(rng, false)));
    oracle.insert(corpus.back().begin(), corpus.back().end());
  }
  auto vocab = build_token_vocabulary(corpus);
  CHECK(vocab.size() == oracle.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) CHECK(vocab.encode(vocab.decode(i)) == i);
  for (const auto& t : oracle) CHECK(vocab.decode(vocab.encode(t)) == t);
  CHECK_THROWS(vocab.encode("not-a-token"));

  auto chars = build_char_vocabulary("aé b\na");
  CHECK(chars.size() == 5);  // a, é, space, b, newline
}
