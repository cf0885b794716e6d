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

#include <cstdint>
#include <string_view>
#include <vector>

#include "tunelab/abc/token.hpp"
#include "tunelab/common/rng.hpp"
#include "tunelab/corpus/corpus.hpp"

namespace tunelab::corpus {

// Tune shapes produced by the synthetic generator. The first three are AABB
// with eight-bar parts; the rest are near misses.
enum class SynthForm {
  RepeatAABB,       // |: A :| |: B :|
  VariantAABB,      // |: A' |1 x :| |2 y | then B the same way
  WrittenAABB,      // A A B B written out, 32 bars
  ThroughComposed,  // A B, 16 bars, no repeats
  ShortParts,       // |: 4 bars :| |: 4 bars :|
  HalfRepeated,     // |: A :| B
  ThreeParts,       // |: A :| |: B :| |: C :|
  WrittenABAB,      // A B A B written out
};
inline constexpr int kSynthForms = 8;

std::string_view to_string(SynthForm form);
bool is_aabb8(SynthForm form);

struct SynthOptions {
  double aabb_fraction = 0.5;  // share of AABB-8 forms
  double pickup_rate = 0.3;
  bool random_keys = true;     // otherwise every tune is in C major
};

struct SynthTune {
  RawEntry entry;        // dump record with the ABC body
  abc::TokenSeq tokens;  // tokenized body, in the entry's own key
  SynthForm form;
  bool aabb8;
};

// One tune. Melodies are diatonic random walks; rhythms fill every bar exactly
// (a pickup is balanced by a short closing bar).
SynthTune synth_tune(CounterRng& rng, const SynthOptions& options, std::int64_t id);

// `count` tunes, each drawn from its own fork of `seed`.
std::vector<SynthTune> synth_corpus(std::uint64_t seed, std::size_t count, const SynthOptions& options = {});

}  // namespace tunelab::corpus
