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

#include "tunelab/stats/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>

#include "tunelab/abc/grammar.hpp"

namespace tunelab::stats {
namespace {

Distribution normalize(const std::map<std::string, std::size_t>& counts) {
  std::size_t total = 0;
  for (const auto& [k, n] : counts) total += n;
  Distribution d;
  for (const auto& [k, n] : counts) d[k] = static_cast<double>(n) / static_cast<double>(total);
  return d;
}

template <class Pick>
Distribution first_of(const Corpus& corpus, abc::TokenKind kind, Pick pick) {
  std::map<std::string, std::size_t> counts;
  for (const auto& seq : corpus) {
    for (const auto& tok : seq) {
      if (tok.kind == kind) {
        ++counts[pick(tok.text)];
        break;
      }
    }
  }
  return normalize(counts);
}

// RFC 4180 quoting; pitch tokens such as `C,` contain commas.
std::string csv(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string bin_label(std::size_t bin, int width) {
  return std::to_string(bin * width) + "-" + std::to_string((bin + 1) * width - 1);
}

void write_distribution(std::ostream& out, const char* title, const Distribution& d) {
  out << title << '\n';
  for (const auto& [k, v] : d) out << "  " << std::left << std::setw(12) << k << std::right << std::fixed
                                   << std::setprecision(4) << v << '\n';
}

}  // namespace

Distribution Histogram::proportions() const {
  Distribution d;
  for (const auto& [bin, n] : counts) d[bin_label(bin, bin_width)] = static_cast<double>(n) / static_cast<double>(total);
  return d;
}

Histogram length_histogram(const Corpus& corpus, int bin_width) {
  if (corpus.empty()) throw Error("length histogram of an empty corpus");
  if (bin_width < 1) throw Error("histogram bin width must be positive");
  Histogram h;
  h.bin_width = bin_width;
  for (const auto& seq : corpus) ++h.counts[seq.size() / static_cast<std::size_t>(bin_width)];
  h.total = corpus.size();
  return h;
}

std::size_t percentile(std::vector<std::size_t> values, double q) {
  if (values.empty()) throw Error("percentile of an empty sample");
  if (!(q > 0 && q <= 1)) throw Error("percentile rank must lie in (0, 1]");
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size()) - 1e-9));
  return values[std::max<std::size_t>(rank, 1) - 1];
}

EndingPitches ending_pitch_distribution(const Corpus& corpus) {
  EndingPitches out;
  std::map<std::string, std::size_t> counts;
  for (const auto& seq : corpus) {
    if (!abc::validate_grammar(seq).valid()) {
      ++out.skipped_invalid;
      continue;
    }
    auto it = std::find_if(seq.rbegin(), seq.rend(), [](const abc::Token& t) {
      return t.kind == abc::TokenKind::Pitch && !abc::is_rest(t.text);
    });
    if (it == seq.rend()) {
      ++out.skipped_no_pitch;
      continue;
    }
    ++counts[it->text];
  }
  out.proportions = normalize(counts);
  return out;
}

Distribution mode_proportions(const Corpus& corpus) {
  return first_of(corpus, abc::TokenKind::Key, [](const std::string& text) {
    std::size_t i = 2 + 1;  // "K:" and the root letter
    if (i < text.size() && (text[i] == '#' || text[i] == 'b')) ++i;
    return text.substr(std::min(i, text.size()));
  });
}

Distribution meter_proportions(const Corpus& corpus) {
  return first_of(corpus, abc::TokenKind::Meter, [](const std::string& text) { return text; });
}

double structure_rate(const Corpus& corpus) {
  if (corpus.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& seq : corpus) {
    try {
      hits += score::detect_structure(seq).aabb8;
    } catch (const Error&) {
    }
  }
  return static_cast<double>(hits) / static_cast<double>(corpus.size());
}

ErrorCensus error_census(const Corpus& corpus) {
  ErrorCensus census{};
  for (const auto& seq : corpus) {
    std::set<score::StructErrorKind> kinds;
    for (const auto& e : score::find_errors(seq)) kinds.insert(e.kind);
    for (auto k : kinds) ++census[static_cast<std::size_t>(k)];
  }
  return census;
}

CorpusStats compute_stats(const Corpus& corpus, int bin_width) {
  CorpusStats s;
  s.transcriptions = corpus.size();
  s.lengths = length_histogram(corpus, bin_width);
  std::vector<std::size_t> lengths;
  for (const auto& seq : corpus) lengths.push_back(seq.size());
  s.length_median = percentile(lengths, 0.5);
  s.length_p75 = percentile(lengths, 0.75);
  s.share_at_most_150 = static_cast<double>(std::count_if(lengths.begin(), lengths.end(),
                                                           [](std::size_t n) { return n <= 150; })) /
                        static_cast<double>(lengths.size());
  s.endings = ending_pitch_distribution(corpus);
  s.modes = mode_proportions(corpus);
  s.meters = meter_proportions(corpus);
  s.aabb8_rate = structure_rate(corpus);
  s.errors = error_census(corpus);
  return s;
}

double total_variation(const Distribution& p, const Distribution& q) {
  double sum = 0;
  for (const auto& [k, v] : p) {
    auto it = q.find(k);
    sum += std::abs(v - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : q) {
    if (!p.count(k)) sum += v;
  }
  return sum / 2;
}

double Comparison::distance(const std::string& statistic) const {
  for (const auto& r : rows) {
    if (r.statistic == statistic) return r.distance;
  }
  throw Error("no statistic named '" + statistic + "'");
}

Comparison compare(const CorpusStats& a, const CorpusStats& b) {
  if (a.lengths.bin_width != b.lengths.bin_width) {
    throw Error("cannot compare histograms with bin widths " + std::to_string(a.lengths.bin_width) + " and " +
                std::to_string(b.lengths.bin_width));
  }
  Comparison c;
  c.rows.push_back({"lengths", total_variation(a.lengths.proportions(), b.lengths.proportions())});
  c.rows.push_back({"ending_pitch", total_variation(a.endings.proportions, b.endings.proportions)});
  c.rows.push_back({"mode", total_variation(a.modes, b.modes)});
  c.rows.push_back({"meter", total_variation(a.meters, b.meters)});
  c.rows.push_back({"aabb8", std::abs(a.aabb8_rate - b.aabb8_rate)});
  return c;
}

void write_text_report(std::ostream& out, const CorpusStats& s) {
  out << "transcriptions  " << s.transcriptions << '\n';
  out << "length median   " << s.length_median << '\n';
  out << "length p75      " << s.length_p75 << '\n';
  out << std::fixed << std::setprecision(4);
  out << "share <= 150    " << s.share_at_most_150 << '\n';
  out << "aabb8 rate      " << s.aabb8_rate << '\n';
  out << "lengths (bin " << s.lengths.bin_width << ")\n";
  for (const auto& [bin, n] : s.lengths.counts) {
    out << "  " << std::left << std::setw(12) << bin_label(bin, s.lengths.bin_width) << std::right << n << '\n';
  }
  write_distribution(out, "ending pitch", s.endings.proportions);
  out << "  (skipped: " << s.endings.skipped_invalid << " invalid, " << s.endings.skipped_no_pitch
      << " without pitch)\n";
  write_distribution(out, "mode", s.modes);
  write_distribution(out, "meter", s.meters);
  out << "errors\n";
  for (std::size_t k = 0; k < s.errors.size(); ++k) {
    out << "  " << std::left << std::setw(24) << score::to_string(static_cast<score::StructErrorKind>(k)) << std::right
        << s.errors[k] << '\n';
  }
  out.unsetf(std::ios::floatfield);
}

void write_csv_report(std::ostream& out, const CorpusStats& s) {
  out << std::setprecision(10);
  out << "statistic,bin,value\n";
  out << "transcriptions,,"  << s.transcriptions << '\n';
  out << "length_median,," << s.length_median << '\n';
  out << "length_p75,," << s.length_p75 << '\n';
  out << "share_at_most_150,," << s.share_at_most_150 << '\n';
  out << "aabb8_rate,," << s.aabb8_rate << '\n';
  for (const auto& [k, v] : s.lengths.proportions()) out << "lengths," << csv(k) << ',' << v << '\n';
  for (const auto& [k, v] : s.endings.proportions) out << "ending_pitch," << csv(k) << ',' << v << '\n';
  for (const auto& [k, v] : s.modes) out << "mode," << csv(k) << ',' << v << '\n';
  for (const auto& [k, v] : s.meters) out << "meter," << csv(k) << ',' << v << '\n';
  for (std::size_t k = 0; k < s.errors.size(); ++k) {
    out << "errors," << score::to_string(static_cast<score::StructErrorKind>(k)) << ',' << s.errors[k] << '\n';
  }
}

namespace {

void side_by_side(std::ostream& out, const char* name, const Distribution& a, const Distribution& b) {
  std::set<std::string> keys;
  for (const auto& [k, v] : a) keys.insert(k);
  for (const auto& [k, v] : b) keys.insert(k);
  for (const auto& k : keys) {
    auto ia = a.find(k);
    auto ib = b.find(k);
    out << name << ',' << csv(k) << ',' << (ia == a.end() ? 0.0 : ia->second) << ','
        << (ib == b.end() ? 0.0 : ib->second) << '\n';
  }
}

}  // namespace

void write_comparison_csv(std::ostream& out, const CorpusStats& a, const CorpusStats& b) {
  const Comparison c = compare(a, b);
  out << std::setprecision(10);
  out << "statistic,bin,a,b\n";
  side_by_side(out, "lengths", a.lengths.proportions(), b.lengths.proportions());
  side_by_side(out, "ending_pitch", a.endings.proportions, b.endings.proportions);
  side_by_side(out, "mode", a.modes, b.modes);
  side_by_side(out, "meter", a.meters, b.meters);
  for (const auto& r : c.rows) out << r.statistic << ",distance," << r.distance << '\n';
}

void write_comparison_text(std::ostream& out, const CorpusStats& a, const CorpusStats& b) {
  const Comparison c = compare(a, b);
  out << std::fixed << std::setprecision(4);
  out << "statistic       a        b        distance\n";
  out << "aabb8           " << a.aabb8_rate << "   " << b.aabb8_rate << "   " << c.distance("aabb8") << '\n';
  for (const auto& r : c.rows) {
    if (r.statistic != "aabb8") out << std::left << std::setw(16) << r.statistic << std::right << "                  "
                                    << r.distance << '\n';
  }
  out.unsetf(std::ios::floatfield);
}

}  // namespace tunelab::stats
