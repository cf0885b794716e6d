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

#include <array>
#include <cstddef>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "tunelab/abc/token.hpp"
#include "tunelab/score/score.hpp"

namespace tunelab::stats {

using Corpus = std::vector<abc::TokenSeq>;

// Proportions keyed by a label; values sum to 1 (or the map is empty).
using Distribution = std::map<std::string, double>;

struct Histogram {
  int bin_width = 10;
  std::map<std::size_t, std::size_t> counts;  // bin index -> transcriptions
  std::size_t total = 0;

  // Keys are "lo-hi" token ranges.
  Distribution proportions() const;
};

// Token counts per transcription, `<s>` and `<\s>` included. Throws Error on
// an empty corpus or a non-positive bin width.
Histogram length_histogram(const Corpus& corpus, int bin_width = 10);

// Nearest-rank percentile: the smallest value with at least q of the sample at
// or below it. Throws Error on an empty sample or q outside (0, 1].
std::size_t percentile(std::vector<std::size_t> values, double q);

struct EndingPitches {
  Distribution proportions;
  std::size_t skipped_invalid = 0;   // grammar violations
  std::size_t skipped_no_pitch = 0;  // nothing but rests
};

// Last pitch token (rests skipped) of every grammar-valid transcription. Pitch
// tokens are kept verbatim, so `c` and `c'` are different bins.
EndingPitches ending_pitch_distribution(const Corpus& corpus);

// Mode abbreviation of the first key token ("maj", "dor", ...) and the first
// meter token of every transcription that has one.
Distribution mode_proportions(const Corpus& corpus);
Distribution meter_proportions(const Corpus& corpus);

// Share of transcriptions the structure detector calls AABB-8. Transcriptions
// the detector rejects count as not AABB-8.
double structure_rate(const Corpus& corpus);

// Transcriptions with at least one error of each kind.
using ErrorCensus = std::array<std::size_t, score::kStructErrorKinds>;
ErrorCensus error_census(const Corpus& corpus);

struct CorpusStats {
  std::size_t transcriptions = 0;
  Histogram lengths;
  std::size_t length_median = 0;
  std::size_t length_p75 = 0;
  double share_at_most_150 = 0;
  EndingPitches endings;
  Distribution modes;
  Distribution meters;
  double aabb8_rate = 0;
  ErrorCensus errors{};
};

CorpusStats compute_stats(const Corpus& corpus, int bin_width = 10);

// 1/2 sum |p - q| over the union of keys.
double total_variation(const Distribution& p, const Distribution& q);

struct ComparisonRow {
  std::string statistic;
  double distance;
};

struct Comparison {
  std::vector<ComparisonRow> rows;  // lengths, ending_pitch, mode, meter (TV), aabb8 (|a - b|)
  double distance(const std::string& statistic) const;
};

// Throws Error when the two histograms use different bin widths.
Comparison compare(const CorpusStats& a, const CorpusStats& b);

void write_text_report(std::ostream& out, const CorpusStats& s);
// Rows of statistic,bin,value.
void write_csv_report(std::ostream& out, const CorpusStats& s);
// Rows of statistic,bin,a,b followed by statistic,distance,value.
void write_comparison_csv(std::ostream& out, const CorpusStats& a, const CorpusStats& b);
void write_comparison_text(std::ostream& out, const CorpusStats& a, const CorpusStats& b);

}  // namespace tunelab::stats
