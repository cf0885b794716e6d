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

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "support/gen.hpp"
#include "support/toy.hpp"
#include "tunelab/abc/grammar.hpp"
#include "tunelab/stats/stats.hpp"

using namespace tunelab;
using namespace tunelab::stats;

namespace {

abc::TokenSeq seq_of(const std::string& line) { return abc::parse_tokens(line); }

Corpus random_corpus(CounterRng& rng, std::size_t n) {
  Corpus c;
  for (std::size_t i = 0; i < n; ++i) c.push_back(testing::random_tokens(rng, rng.below(2) == 0));
  return c;
}

double sum(const Distribution& d) {
  double s = 0;
  for (const auto& [k, v] : d) {
    CHECK(v >= 0);
    s += v;
  }
  return s;
}

// Independent scan: last token that starts like a pitch (accidental or letter), excluding rests.
std::string oracle_last_pitch(const abc::TokenSeq& seq) {
  for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
    const char c = it->text[0];
    const bool pitchy = c == '^' || c == '_' || c == '=' || (c >= 'A' && c <= 'G') || (c >= 'a' && c <= 'g');
    if (pitchy) return it->text;
  }
  return "";
}

}  // namespace

TEST_CASE("length histogram") {
  abc::TokenSeq long_one = {abc::make_token("<s>"), abc::make_token("M:4/4"), abc::make_token("K:Cmaj")};
  while (long_one.size() < 149) long_one.push_back(abc::make_token("C"));
  long_one.push_back(abc::make_token("<\\s>"));
  REQUIRE(long_one.size() == 150);
  const auto h = length_histogram({long_one});
  CHECK(h.counts.size() == 1);
  CHECK(h.counts.at(15) == 1);
  CHECK(h.proportions().at("150-159") == 1.0);
  CHECK_THROWS_AS(length_histogram({}), Error);
  CHECK_THROWS_AS(length_histogram({long_one}, 0), Error);
}

TEST_CASE("percentiles match a counting oracle") {
  CounterRng rng(8);
  for (int run = 0; run < 300; ++run) {
    std::vector<std::size_t> v(1 + rng.below(60));
    for (auto& x : v) x = rng.below(300);
    const double q = (1 + rng.below(100)) / 100.0;
    // Smallest observed value with at least q*n values at or below it.
    std::size_t oracle = SIZE_MAX;
    for (std::size_t cand : v) {
      const auto at_or_below = std::count_if(v.begin(), v.end(), [&](std::size_t x) { return x <= cand; });
      if (static_cast<double>(at_or_below) >= q * v.size() - 1e-9) oracle = std::min(oracle, cand);
    }
    CHECK(percentile(v, q) == oracle);
  }
  CHECK_THROWS_AS(percentile({}, 0.5), Error);
  CHECK_THROWS_AS(percentile({1}, 0.0), Error);
}

TEST_CASE("ending pitch distribution") {
  const Corpus all_c = {seq_of("<s> M:4/4 K:Cmaj D E C | <\\s>"), seq_of("<s> M:6/8 K:Cdor C 2 z | <\\s>")};
  const auto d = ending_pitch_distribution(all_c);
  CHECK(d.proportions == Distribution{{"C", 1.0}});

  const Corpus mixed = {seq_of("<s> M:4/4 K:Cmaj C | <\\s>"), seq_of("<s> K:Cmaj M:4/4 C | <\\s>"),
                        seq_of("<s> M:4/4 K:Cmaj z | <\\s>")};
  const auto m = ending_pitch_distribution(mixed);
  CHECK(m.skipped_invalid == 1);
  CHECK(m.skipped_no_pitch == 1);

  CounterRng rng(12);
  for (int run = 0; run < 30; ++run) {
    const auto corpus = random_corpus(rng, 1 + rng.below(80));
    const auto got = ending_pitch_distribution(corpus);
    std::map<std::string, double> counts;
    double n = 0;
    for (const auto& s : corpus) {
      const auto p = oracle_last_pitch(s);
      if (p.empty()) continue;
      counts[p] += 1;
      n += 1;
    }
    for (auto& [k, v] : counts) v /= n;
    REQUIRE(got.proportions.size() == counts.size());
    for (const auto& [k, v] : counts) CHECK(got.proportions.at(k) == doctest::Approx(v).epsilon(1e-12));
    CHECK(std::abs(sum(got.proportions) - 1.0) < 1e-9);
  }
}

TEST_CASE("mode and meter proportions") {
  const Corpus one = {seq_of("<s> M:9/8 K:Cmix C | <\\s>")};
  CHECK(mode_proportions(one) == Distribution{{"mix", 1.0}});
  CHECK(meter_proportions(one) == Distribution{{"M:9/8", 1.0}});
  CHECK(mode_proportions({seq_of("<s> M:4/4 K:F#min C | <\\s>"), seq_of("<s> M:4/4 K:Bbmaj C | <\\s>")}) ==
        Distribution{{"maj", 0.5}, {"min", 0.5}});

  CounterRng rng(13);
  for (int run = 0; run < 20; ++run) {
    const auto corpus = random_corpus(rng, 1 + rng.below(100));
    // Grep-style count over the written lines.
    std::string text;
    for (const auto& s : corpus) text += " " + abc::format_tokens(s) + " \n";
    const auto modes = mode_proportions(corpus);
    const auto meters = meter_proportions(corpus);
    CHECK(std::abs(sum(modes) - 1.0) < 1e-9);
    CHECK(std::abs(sum(meters) - 1.0) < 1e-9);
    for (const auto& meter : testing::kMeters) {
      std::size_t hits = 0;
      for (std::size_t at = text.find(" " + meter + " "); at != std::string::npos;
           at = text.find(" " + meter + " ", at + 1)) ++hits;
      const double got = meters.count(meter) ? meters.at(meter) : 0.0;
      CHECK(got == doctest::Approx(static_cast<double>(hits) / corpus.size()).epsilon(1e-12));
    }
    for (const auto& mode : testing::kModes) {
      std::size_t hits = 0;
      std::istringstream lines(text);
      std::string line;
      while (std::getline(lines, line)) {
        const auto k = line.find(" K:");
        const auto end = line.find(' ', k + 1);
        const std::string key = line.substr(k + 3, end - k - 3);
        hits += key.size() >= 3 && key.substr(key.size() - 3) == mode;
      }
      const double got = modes.count(mode) ? modes.at(mode) : 0.0;
      CHECK(got == doctest::Approx(static_cast<double>(hits) / corpus.size()).epsilon(1e-12));
    }
  }
}

TEST_CASE("structure rate") {
  corpus::SynthOptions all_aabb;
  all_aabb.aabb_fraction = 1.0;
  Corpus aabb;
  for (const auto& line : testing::toy_token_lines(31, 120, all_aabb)) {
    abc::TokenSeq s;
    for (const auto& t : line) s.push_back(abc::make_token(t));
    aabb.push_back(s);
  }
  CHECK(structure_rate(aabb) == 1.0);

  Corpus mixed;
  for (const auto& line : testing::toy_token_lines(32, 200)) {
    abc::TokenSeq s;
    for (const auto& t : line) s.push_back(abc::make_token(t));
    mixed.push_back(s);
  }
  double hits = 0;
  for (const auto& s : mixed) hits += score::detect_structure(s).aabb8 ? 1 : 0;
  CHECK(structure_rate(mixed) == hits / mixed.size());
  CHECK(structure_rate(mixed) > 0.3);
  CHECK(structure_rate(mixed) < 0.7);
  CHECK(structure_rate({}) == 0.0);
}

TEST_CASE("error census recovers planted defects") {
  CounterRng rng(14);
  Corpus clean;
  while (clean.size() < 60) {
    auto s = testing::random_tokens(rng);
    if (score::find_errors(s).empty()) clean.push_back(s);
  }
  CHECK(error_census(clean) == ErrorCensus{});

  const std::vector<std::string> defects = {
      "|: C D |1 E :| |1 F |",  // repeated first ending
      "|: C D |1 E :|",         // first ending never followed by a second
      "C ] D |",                // chord close without an open
      "|: C D |",               // repeat opened and never closed
  };
  Corpus planted = clean;
  for (std::size_t k = 0; k < defects.size(); ++k) {
    for (int i = 0; i < 10; ++i) {
      auto s = clean[(k * 10 + i) % clean.size()];
      auto extra = abc::parse_tokens(defects[k]);
      s.insert(s.end() - 1, extra.begin(), extra.end());
      planted.push_back(s);
    }
  }
  const auto census = error_census(planted);
  for (std::size_t k = 0; k < defects.size(); ++k) CHECK(census[k] == 10);

  // Definitional consistency with find_errors.
  ErrorCensus again{};
  for (const auto& s : planted) {
    bool seen[score::kStructErrorKinds] = {};
    for (const auto& e : score::find_errors(s)) seen[static_cast<std::size_t>(e.kind)] = true;
    for (std::size_t k = 0; k < score::kStructErrorKinds; ++k) again[k] += seen[k];
  }
  CHECK(again == census);
}

TEST_CASE("comparison distances") {
  CounterRng rng(15);
  const auto a = random_corpus(rng, 80);
  const auto b = random_corpus(rng, 50);
  const auto sa = compute_stats(a), sb = compute_stats(b);
  for (const auto& r : compare(sa, sa).rows) CHECK(r.distance == 0.0);
  const auto ab = compare(sa, sb), ba = compare(sb, sa);
  for (std::size_t i = 0; i < ab.rows.size(); ++i) CHECK(ab.rows[i].distance == doctest::Approx(ba.rows[i].distance));

  // 1/2 sum |p - q| written out over a shared key list.
  std::set<std::string> keys;
  for (const auto& [k, v] : sa.modes) keys.insert(k);
  for (const auto& [k, v] : sb.modes) keys.insert(k);
  double tv = 0;
  for (const auto& k : keys) tv += std::abs((sa.modes.count(k) ? sa.modes.at(k) : 0) - (sb.modes.count(k) ? sb.modes.at(k) : 0));
  CHECK(ab.distance("mode") == doctest::Approx(tv / 2).epsilon(1e-12));

  CHECK(total_variation({{"x", 1.0}}, {{"y", 1.0}}) == 1.0);
  const Corpus short_one = {seq_of("<s> M:4/4 K:Cmaj C | <\\s>")};
  abc::TokenSeq longer = short_one[0];
  longer.insert(longer.end() - 1, 20, abc::make_token("D"));
  CHECK(compare(compute_stats(short_one), compute_stats({longer})).distance("lengths") == 1.0);

  CHECK_THROWS_AS(compare(compute_stats(a, 10), compute_stats(a, 20)), Error);
}

TEST_CASE("statistics ignore corpus order and reports are well formed") {
  CounterRng rng(16);
  auto corpus = random_corpus(rng, 70);
  const auto s1 = compute_stats(corpus);
  rng.shuffle(std::span<abc::TokenSeq>(corpus));
  const auto s2 = compute_stats(corpus);
  CHECK(s1.lengths.counts == s2.lengths.counts);
  CHECK(s1.endings.proportions == s2.endings.proportions);
  CHECK(s1.modes == s2.modes);
  CHECK(s1.meters == s2.meters);
  CHECK(s1.aabb8_rate == s2.aabb8_rate);
  CHECK(s1.errors == s2.errors);
  CHECK(std::abs(sum(s1.lengths.proportions()) - 1.0) < 1e-9);

  std::ostringstream csv, text, cmp;
  write_csv_report(csv, s1);
  write_text_report(text, s1);
  write_comparison_csv(cmp, s1, s2);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "statistic,bin,value");
  bool saw_quoted = false;
  while (std::getline(lines, line)) {
    // Separators outside quotes.
    int fields = 1;
    bool quoted = false;
    for (char c : line) {
      if (c == '"') quoted = !quoted, saw_quoted = true;
      else if (c == ',' && !quoted) ++fields;
    }
    CHECK(fields == 3);
  }
  CHECK(saw_quoted);  // some ending pitch such as C, needs quoting
  CHECK(text.str().find("aabb8 rate") != std::string::npos);
  CHECK(cmp.str().find("mode,distance,0") != std::string::npos);
}
