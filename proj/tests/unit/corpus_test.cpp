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

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "support/gen.hpp"
#include "support/oracles.hpp"
#include "tunelab/abc/grammar.hpp"
#include "tunelab/abc/key.hpp"
#include "tunelab/abc/tokenizer.hpp"
#include "tunelab/abc/vocabulary.hpp"
#include "tunelab/corpus/corpus.hpp"
#include "tunelab/corpus/synth.hpp"
#include "tunelab/score/score.hpp"

using namespace tunelab;
using namespace tunelab::corpus;

namespace {

std::vector<RawEntry> cup_of_tea() {
  std::ifstream in(TUNELAB_TEST_DATA "/cup_of_tea.csv");
  REQUIRE(in);
  auto parsed = parse_dump(in);
  REQUIRE(parsed.rejected.empty());
  return parsed.entries;
}

RawEntry entry(std::string body, std::string key = "Cmajor", std::string meter = "4/4") {
  RawEntry e;
  e.tune_id = 1;
  e.setting_id = 1;
  e.title = "Test";
  e.tune_type = "reel";
  e.meter = std::move(meter);
  e.key_text = std::move(key);
  e.abc_body = std::move(body);
  return e;
}

std::string random_field(CounterRng& rng) {
  static const std::string kAlphabet = "abcXYZ|:,\"\n 19'^_=é";
  std::string s;
  std::size_t n = rng.below(30);
  for (std::size_t i = 0; i < n; ++i) s += kAlphabet[rng.below(kAlphabet.size())];
  return s;
}

}  // namespace

TEST_CASE("parse_dump reads the two settings") {
  auto entries = cup_of_tea();
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].tune_id == 3038);
  CHECK(entries[0].setting_id == 3038);
  CHECK(entries[1].tune_id == 3038);
  CHECK(entries[1].setting_id == 21045);
  CHECK(entries[0].key_text == "Amixolydian");
  CHECK(entries[1].key_text == "Adorian");
  CHECK(entries[0].title == "A Cup Of Tea");
  CHECK(entries[1].user == "sebastian the megafrog");
  CHECK(entries[0].abc_body.find('\n') != std::string::npos);
}

TEST_CASE("parse_dump on an empty stream") {
  std::istringstream in("");
  auto parsed = parse_dump(in);
  CHECK(parsed.entries.empty());
  CHECK(parsed.rejected.empty());
}

TEST_CASE("parse_dump refuses an unreadable stream") {
  std::ifstream missing("/nonexistent/dump.csv");
  CHECK_THROWS_AS(parse_dump(missing), IoError);
}

TEST_CASE("records written by an independent writer parse back identically") {
  CounterRng rng(31);
  std::vector<RawEntry> expected;
  std::string text;
  for (int i = 0; i < 300; ++i) {
    RawEntry e;
    e.tune_id = 1 + static_cast<std::int64_t>(rng.below(100000));
    e.setting_id = 1 + static_cast<std::int64_t>(rng.below(100000));
    e.title = random_field(rng);
    e.tune_type = random_field(rng);
    e.meter = random_field(rng);
    e.key_text = random_field(rng);
    e.abc_body = "A" + random_field(rng) + "\"q\"\nB";
    e.date = random_field(rng);
    e.user = random_field(rng);
    std::vector<std::string> fields = {std::to_string(e.tune_id), std::to_string(e.setting_id), e.title, e.tune_type,
                                       e.meter, e.key_text, e.abc_body, e.date, e.user};
    text += testing::oracle_csv_record(fields, {false, false, true, true, true, true, true, true, true});
    expected.push_back(e);
  }
  std::istringstream in(text);
  auto parsed = parse_dump(in);
  CHECK(parsed.rejected.empty());
  CHECK(parsed.entries == expected);

  // The library's own writer agrees with the oracle.
  std::string mine;
  for (const auto& e : expected) mine += format_dump_record(e);
  std::istringstream again(mine);
  CHECK(parse_dump(again).entries == expected);
}

TEST_CASE("malformed records are skipped and tallied") {
  std::string text =
      "tune_id,setting_id,name,type,meter,mode,abc,date,username\n"
      "1,1,\"T\",\"reel\",\"4/4\",\"Dmajor\",\"ABcd|\",\"d\",\"u\"\n"
      "2,2,\"T\",\"reel\",\"4/4\",\"Dmajor\",\"AB\"cd|\",\"d\",\"u\"\n"
      "3,3,\"T\",\"reel\"\n"
      "x,4,\"T\",\"reel\",\"4/4\",\"Dmajor\",\"AB\",\"d\",\"u\"\n"
      "5,5,\"T\",\"reel\",\"4/4\",\"Dmajor\",\"  \",\"d\",\"u\"\n"
      "6,6,\"T\",\"reel\",\"4/4\",\"Dmajor\",\"unterminated,\"d\",\"u\"\n";
  std::istringstream in(text);
  auto parsed = parse_dump(in);
  REQUIRE(parsed.entries.size() == 1);
  CHECK(parsed.entries[0].tune_id == 1);
  CHECK(parsed.rejected.at("header row") == 1);
  CHECK(parsed.rejected.at("malformed quoting") == 2);
  CHECK(parsed.rejected.at("wrong field count") == 1);
  CHECK(parsed.rejected.at("bad identifier") == 1);
  CHECK(parsed.rejected.at("empty body") == 1);
  CHECK(tally_total(parsed.rejected) + parsed.entries.size() == 7);
}

TEST_CASE("char corpus reproduces the reformatted listing") {
  auto corpus = build_char_corpus(cup_of_tea());
  CHECK(corpus.entry_count == 2);
  CHECK(corpus.text ==
        "T: A Cup Of Tea\nM: 4/4\nL: 1/8\nK: Amix\n"
        "|:eA (3AAA g2 fg|eA (3AAA BGGf|eA (3AAA g2 fg|1afge d2 gf:|2afge d2 cd||\n"
        "|:eaag efgf|eaag edBd|eaag efge|afge dgfg:|\n"
        "\n"
        "T: A Cup Of Tea\nM: 4/4\nL: 1/8\nK: Ador\n"
        "eAAa ~g2fg|eA~A2 BGBd|eA~A2 ~g2fg|1af (3gfe dG~G2:|2af (3gfe d2^cd||\n"
        "eaag efgf|eaag ed (3Bcd|eaag efgb|af (3gfe d2^cd:|\n");
  CHECK(build_char_corpus({}).text.empty());

  auto with_bad = cup_of_tea();
  with_bad.push_back(entry("   \n  "));
  with_bad.push_back(entry("ABC", "Zlydian"));
  auto c2 = build_char_corpus(with_bad);
  CHECK(c2.entry_count == 2);
  CHECK(c2.rejected.at("empty body") == 1);
  CHECK(c2.rejected.at("unparseable key") == 1);
}

TEST_CASE("char vocabulary matches a set-of-characters oracle") {
  auto tunes = synth_corpus(7, 50);
  std::vector<RawEntry> entries;
  for (const auto& t : tunes) entries.push_back(t.entry);
  auto text = build_char_corpus(entries).text;
  std::set<char> oracle(text.begin(), text.end());  // ASCII-only corpus
  CHECK(abc::build_char_vocabulary(text).size() == oracle.size());
}

TEST_CASE("filter_for_tokens") {
  auto tea = cup_of_tea();
  std::vector<RawEntry> input = tea;
  input.push_back(entry("C D E F|G A B c|c B A G|F E D C|"));
  input.push_back(entry("CDEF|GABc|cBAG|FEDC|\nK:G\nCDEF|GABc|cBAG|FEDC|"));
  input.push_back(entry("CDEF|GABc|cBAG|FEDC|[M:3/4]CDE|GAB|cBA|"));
  input.push_back(entry("V:1\nCDEF|GABc|cBAG|FEDC|CDEF|GABc|cBAG|FEDC|"));
  input.push_back(entry("CDEF|GABc|cBAG|FEDC|CDEF|GABc|cBAG|FEDC|", "Clydian"));
  input.push_back(entry("CDEF|GABc|cBAG|FEDC|CDEF|GABc|cBAG|FEDC|", "Q"));
  input.push_back(entry("CDEF|GABc|cBAG|FEDC|CD#EF|GABc|cBAG|FEDC|"));
  input.push_back(entry("|:CDEF|GA|:Bc:|cBAG:|FEDC|CDEF|GABc|cBAG|FEDC|"));
  input.push_back(entry("T:Second title\n~C.D{g}EF|(GA)Bc|\"G\"cBAG|FEDC|!roll!CDEF|GABc|cBAG|FEDC|"));
  auto out = filter_for_tokens(input);
  REQUIRE(out.entries.size() == 3);
  CHECK(out.entries[0].setting_id == 3038);
  CHECK(out.entries[1].setting_id == 21045);
  CHECK(out.entries[1].abc_body.find('~') == std::string::npos);
  CHECK(out.entries[2].abc_body == "CDEF|GABc|cBAG|FEDC|CDEF|GABc|cBAG|FEDC|");
  CHECK(out.rejected.at("fewer than 7 measures") == 1);
  CHECK(out.rejected.at("meter or key change") == 2);
  CHECK(out.rejected.at("multiple voices") == 1);
  CHECK(out.rejected.at("unsupported mode") == 1);
  CHECK(out.rejected.at("unparseable key") == 1);
  CHECK(out.rejected.at("untokenizable body") == 1);
  CHECK(out.rejected.at("unsupported repeat structure") == 1);
  CHECK(tally_total(out.rejected) + out.entries.size() == input.size());
  CHECK(out.stripped.titles == 1);
  CHECK(out.stripped.ornaments == 2 + 5);  // this entry, plus the five ~ in setting 21045
  CHECK(out.stripped.decorations == 5);
}

TEST_CASE("seven measures counting repetitions") {
  // Four written bars, repeated: eight played.
  auto out = filter_for_tokens({entry("|:CDEF|GABc|cBAG|FEDC:|"), entry("CDEF|GABc|cBAG|FEDC|CDEF|GABc|")});
  CHECK(out.entries.size() == 1);
  CHECK(out.rejected.at("fewer than 7 measures") == 1);
}

TEST_CASE("token corpus reproduces the tokenized listings") {
  auto corpus = build_token_corpus(filter_for_tokens(cup_of_tea()).entries, false);
  REQUIRE(corpus.transcriptions.size() == 2);
  std::ostringstream out;
  write_token_corpus(out, corpus.transcriptions);
  CHECK(out.str() ==
        "<s> M:4/4 K:Cmix |: g c (3 c c c b 2 a b | g c (3 c c c d B B a | g c (3 "
        "c c c b 2 a b |1 c' a b g f 2 b a :| |2 c' a b g f 2 e f |: g c' c' b g "
        "a b a | g c' c' b g f d f | g c' c' b g a b g | c' a b g f b a b :| <\\s>\n"
        "<s> M:4/4 K:Cdor g c c c' b 2 a b | g c c 2 d B d f | g c c 2 b 2 a b |1 "
        "c' a (3 b a g f B B 2 :| |2 c' a (3 b a g f 2 =e f | g c' c' b g a b a | g "
        "c' c' b g f (3 d e f | g c' c' b g a b d' | c' a (3 b a g f 2 =e f :| <\\s>\n");
  std::istringstream in(out.str());
  CHECK(read_token_corpus(in) == corpus.transcriptions);
}

TEST_CASE("an entry in C major is tokenized unchanged") {
  auto e = entry("CDEF|^GAB=c|");
  auto corpus = build_token_corpus({e}, false);
  REQUIRE(corpus.transcriptions.size() == 1);
  CHECK(corpus.transcriptions[0] == abc::tokenize_body(e.abc_body, "4/4", abc::parse_key("C")));
}

TEST_CASE("explicit repeats match a textual expander") {
  auto corpus = build_token_corpus({entry("|:CD EF:|GA Bc|")}, true);
  REQUIRE(corpus.transcriptions.size() == 1);
  auto texts = abc::split_tokens(abc::format_tokens(corpus.transcriptions[0]));
  for (const auto& t : texts) {
    CHECK(t != "|:");
    CHECK(t != ":|");
  }
  CHECK(testing::oracle_expand(texts) == std::vector<std::string>{"C", "D", "E", "F", "C", "D", "E", "F", "G", "A", "B", "c"});

  auto tunes = synth_corpus(8, 100);
  std::vector<RawEntry> entries;
  std::vector<abc::TokenSeq> plain;
  for (const auto& t : tunes) {
    if (t.form == SynthForm::VariantAABB) continue;  // the oracle has no endings
    entries.push_back(t.entry);
  }
  auto with = build_token_corpus(entries, true);
  auto without = build_token_corpus(entries, false);
  REQUIRE(with.transcriptions.size() == entries.size());
  REQUIRE(without.transcriptions.size() == entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    std::vector<std::string> a, b;
    for (const auto& t : with.transcriptions[i]) a.push_back(t.text);
    for (const auto& t : without.transcriptions[i]) b.push_back(t.text);
    CHECK(testing::oracle_expand(a) == testing::oracle_expand(b));
  }
}

TEST_CASE("token corpus invariants on synthetic dumps") {
  auto tunes = synth_corpus(9, 300);
  std::vector<RawEntry> entries;
  for (const auto& t : tunes) entries.push_back(t.entry);
  entries.push_back(entry("CDEF|[CEG]2 c]d|GABc|cBAG|FEDC|CDEF|GABc|cBAG|"));
  entries.push_back(entry("CDEF|GABc|cBAG|FEDC|CDEF|GABc|cBAG|", "Zoo"));
  for (bool explicit_repeats : {false, true}) {
    auto a = build_token_corpus(entries, explicit_repeats);
    auto b = build_token_corpus(entries, explicit_repeats);
    std::ostringstream sa, sb;
    write_token_corpus(sa, a.transcriptions);
    write_token_corpus(sb, b.transcriptions);
    CHECK(sa.str() == sb.str());
    CHECK(a.transcriptions.size() + tally_total(a.rejected) == entries.size());
    CHECK(a.rejected.at("unmatched chord bracket") == 1);
    CHECK(a.rejected.at("unparseable key") == 1);
    for (const auto& seq : a.transcriptions) {
      CHECK(abc::validate_grammar(seq).valid());
      CHECK(seq[0].text == "<s>");
      CHECK(seq[1].kind == abc::TokenKind::Meter);
      CHECK(seq[2].text.rfind("K:C", 0) == 0);
      CHECK(abc::parse_key(seq[2].text).root == 0);
      CHECK(seq.back().text == "<\\s>");
      int meters = 0, keys = 0;
      for (const auto& t : seq) {
        meters += t.kind == abc::TokenKind::Meter;
        keys += t.kind == abc::TokenKind::Key;
      }
      CHECK(meters == 1);
      CHECK(keys == 1);
    }
  }
}

TEST_CASE("rejection report") {
  std::ostringstream out;
  write_tally(out, {{"empty body", 2}, {"unsupported mode", 5}}, 40);
  auto text = out.str();
  CHECK(text.find("empty body") != std::string::npos);
  std::map<std::string, std::string> rows;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    auto last = line.find_last_of(' ');
    if (last != std::string::npos) rows[line.substr(0, line.find("  "))] = line.substr(last + 1);
  }
  CHECK(rows["retained"] == "40");
  CHECK(rows["input"] == "47");
  CHECK(rows["unsupported mode"] == "5");
}

TEST_CASE("synthetic tunes carry correct structure labels") {
  auto tunes = synth_corpus(10, 1000);
  std::size_t correct = 0, aabb = 0;
  for (const auto& t : tunes) {
    aabb += t.aabb8;
    correct += score::detect_structure(t.tokens).aabb8 == t.aabb8;
    CHECK(score::detect_structure(score::expand_repeats(t.tokens)).aabb8 == t.aabb8);
    CHECK(score::validate_measures(t.tokens).error_count == 0);
    auto back = abc::tokenize_body(t.entry.abc_body, t.entry.meter, abc::parse_key(t.entry.key_text));
    CHECK(back == t.tokens);
  }
  CHECK(correct == tunes.size());
  CHECK(aabb > 400);
  CHECK(aabb < 600);
  // Same seed, same corpus.
  auto again = synth_corpus(10, 1000);
  for (std::size_t i = 0; i < tunes.size(); ++i) CHECK(again[i].entry == tunes[i].entry);
}
