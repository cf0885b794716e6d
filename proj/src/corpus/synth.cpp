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

#include "tunelab/corpus/synth.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "tunelab/abc/key.hpp"
#include "tunelab/abc/pitch.hpp"
#include "tunelab/abc/tokenizer.hpp"

namespace tunelab::corpus {
namespace {

struct MeterInfo {
  const char* text;
  const char* type;
  int eighths;
};

constexpr std::array<MeterInfo, 5> kMeters{{
    {"4/4", "reel", 8},
    {"6/8", "jig", 6},
    {"3/4", "waltz", 6},
    {"2/4", "polka", 4},
    {"9/8", "slip jig", 9},
}};

constexpr std::array<const char*, 10> kRoots{"C", "D", "E", "F", "G", "A", "B", "Bb", "Eb", "F#"};
constexpr std::array<const char*, 4> kModeNames{"major", "minor", "dorian", "mixolydian"};

using Bar = std::vector<std::string>;

class TuneWriter {
 public:
  TuneWriter(CounterRng& rng, int eighths) : rng_(rng), eighths_(eighths) {}

  // Steps are diatonic offsets from D4, kept between D4 and b5.
  std::string pitch_text() {
    int move = static_cast<int>(rng_.below(5)) - 2;
    if (rng_.below(6) == 0) move *= 2;
    step_ = std::clamp(step_ + move, 0, 12);
    abc::PitchSpelling p;
    int absolute = step_ + 1 + 4 * 7;  // D4 = step 29
    p.letter = absolute % 7;
    p.octave = absolute / 7;
    return abc::format_pitch(p);
  }

  Bar bar(int length) {
    Bar out;
    int left = length;
    while (left > 0) {
      auto r = rng_.below(10);
      if (r == 0 && left >= 2) {
        out.insert(out.end(), {"(3", pitch_text(), pitch_text(), pitch_text()});
        left -= 2;
      } else if (r == 1 && left >= 2) {
        out.insert(out.end(), {pitch_text(), "3/2", pitch_text(), "/2"});
        left -= 2;
      } else if (r <= 3 && left >= 2) {
        out.insert(out.end(), {pitch_text(), "2"});
        left -= 2;
      } else if (r == 4 && left >= 3) {
        out.insert(out.end(), {pitch_text(), "3"});
        left -= 3;
      } else {
        out.push_back(pitch_text());
        left -= 1;
      }
    }
    return out;
  }

  // `n` bars; with a pickup the last one is shortened to balance it.
  std::vector<Bar> part(int n, int pickup) {
    std::vector<Bar> bars;
    for (int i = 0; i < n; ++i) bars.push_back(bar(i + 1 == n ? eighths_ - pickup : eighths_));
    return bars;
  }

 private:
  CounterRng& rng_;
  int eighths_;
  int step_ = 7;
};

void append(std::vector<std::string>& out, const Bar& bar) { out.insert(out.end(), bar.begin(), bar.end()); }

// `|: pickup? bars :|`; the pickup is repeated inside the section.
void repeated_part(std::vector<std::string>& out, const Bar& pickup, const std::vector<Bar>& bars) {
  out.push_back("|:");
  if (!pickup.empty()) {
    append(out, pickup);
    out.push_back("|");
  }
  for (std::size_t i = 0; i < bars.size(); ++i) {
    append(out, bars[i]);
    out.push_back(i + 1 == bars.size() ? ":|" : "|");
  }
}

void written_part(std::vector<std::string>& out, const std::vector<Bar>& bars) {
  for (const auto& bar : bars) {
    append(out, bar);
    out.push_back("|");
  }
}

}  // namespace

std::string_view to_string(SynthForm form) {
  switch (form) {
    case SynthForm::RepeatAABB: return "repeat-aabb";
    case SynthForm::VariantAABB: return "variant-aabb";
    case SynthForm::WrittenAABB: return "written-aabb";
    case SynthForm::ThroughComposed: return "through-composed";
    case SynthForm::ShortParts: return "short-parts";
    case SynthForm::HalfRepeated: return "half-repeated";
    case SynthForm::ThreeParts: return "three-parts";
    case SynthForm::WrittenABAB: return "written-abab";
  }
  return "?";
}

bool is_aabb8(SynthForm form) {
  return form == SynthForm::RepeatAABB || form == SynthForm::VariantAABB || form == SynthForm::WrittenAABB;
}

SynthTune synth_tune(CounterRng& rng, const SynthOptions& options, std::int64_t id) {
  const bool aabb = rng.uniform() < options.aabb_fraction;
  const auto form = static_cast<SynthForm>(aabb ? rng.below(3) : 3 + rng.below(5));
  const auto& meter = kMeters[rng.below(kMeters.size())];
  std::string key_text = "Cmajor";
  if (options.random_keys)
    key_text = std::string(kRoots[rng.below(kRoots.size())]) + kModeNames[rng.below(kModeNames.size())];
  const int eighths = meter.eighths;
  // Written-out forms keep whole bars so the bar grid is unambiguous.
  const bool written = form == SynthForm::WrittenAABB || form == SynthForm::ThroughComposed ||
                       form == SynthForm::WrittenABAB;
  const int pickup = (!written && rng.uniform() < options.pickup_rate) ? 1 + static_cast<int>(rng.below(2)) : 0;

  TuneWriter w(rng, eighths);
  Bar pickup_bar = pickup ? w.bar(pickup) : Bar{};
  std::vector<std::string> body;
  switch (form) {
    case SynthForm::RepeatAABB:
      repeated_part(body, pickup_bar, w.part(8, pickup));
      repeated_part(body, pickup ? w.bar(pickup) : Bar{}, w.part(8, pickup));
      break;
    case SynthForm::VariantAABB:
      for (int p = 0; p < 2; ++p) {
        auto bars = w.part(7, 0);
        Bar lead = p == 0 ? pickup_bar : (pickup ? w.bar(pickup) : Bar{});
        body.push_back("|:");
        if (!lead.empty()) {
          append(body, lead);
          body.push_back("|");
        }
        for (const auto& bar : bars) {
          append(body, bar);
          body.push_back("|");
        }
        body.back() = "|1";
        append(body, w.bar(eighths - pickup));
        body.push_back(":|");
        body.push_back("|2");
        append(body, w.bar(eighths - pickup));
        if (p == 1) body.push_back("|");  // otherwise the next `|:` closes it
      }
      break;
    case SynthForm::WrittenAABB: {
      auto a = w.part(8, 0);
      auto b = w.part(8, 0);
      // Second endings may differ in the last two bars of each part.
      auto a2 = a;
      a2[7] = w.bar(eighths);
      auto b2 = b;
      b2[7] = w.bar(eighths);
      for (const auto* part : {&a, &a2, &b, &b2}) written_part(body, *part);
      break;
    }
    case SynthForm::ThroughComposed:
      written_part(body, w.part(8, 0));
      written_part(body, w.part(8, 0));
      break;
    case SynthForm::ShortParts:
      repeated_part(body, pickup_bar, w.part(4, pickup));
      repeated_part(body, pickup ? w.bar(pickup) : Bar{}, w.part(4, pickup));
      break;
    case SynthForm::HalfRepeated:
      repeated_part(body, pickup_bar, w.part(8, pickup));
      written_part(body, w.part(8, 0));
      break;
    case SynthForm::ThreeParts:
      for (int p = 0; p < 3; ++p) repeated_part(body, p == 0 ? pickup_bar : (pickup ? w.bar(pickup) : Bar{}), w.part(8, pickup));
      break;
    case SynthForm::WrittenABAB: {
      auto a = w.part(8, 0);
      auto b = w.part(8, 0);
      for (const auto* part : {&a, &b, &a, &b}) written_part(body, *part);
      break;
    }
  }

  const auto key = abc::parse_key(key_text);
  abc::TokenSeq tokens{abc::make_token(abc::kStartToken), abc::make_token(abc::meter_token(meter.text)),
                       abc::make_token(abc::key_token(key))};
  for (const auto& t : body) tokens.push_back(abc::make_token(t));
  tokens.push_back(abc::make_token(abc::kEndToken));

  SynthTune tune;
  tune.entry.tune_id = id;
  tune.entry.setting_id = id;
  tune.entry.title = "Synthetic " + std::string(meter.type) + " " + std::to_string(id);
  tune.entry.tune_type = meter.type;
  tune.entry.meter = meter.text;
  tune.entry.key_text = key_text;
  tune.entry.abc_body = abc::detokenize_body(tokens);
  tune.entry.date = "2026-01-01 00:00:00";
  tune.entry.user = "synth";
  tune.tokens = std::move(tokens);
  tune.form = form;
  tune.aabb8 = is_aabb8(form);
  return tune;
}

std::vector<SynthTune> synth_corpus(std::uint64_t seed, std::size_t count, const SynthOptions& options) {
  CounterRng root(seed);
  std::vector<SynthTune> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto rng = root.fork(i);
    out.push_back(synth_tune(rng, options, static_cast<std::int64_t>(i + 1)));
  }
  return out;
}

}  // namespace tunelab::corpus
