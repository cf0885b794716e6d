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

#include "tunelab/lm/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "tunelab/common/rng.hpp"

namespace tunelab::lm {

const std::string& ModelVocab::decode(int index) const {
  static const std::string null_text(kNullSymbol);
  if (null_index() && index == *null_index()) return null_text;
  return symbols.decode(static_cast<std::size_t>(index));
}

std::uint64_t TrainingData::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(vocab.mode));
  for (const auto& s : vocab.symbols.elements()) {
    for (unsigned char c : s) mix(c);
    mix(0xFFFF);
  }
  for (const auto& seq : sequences) {
    mix(seq.size());
    for (int x : seq) mix(static_cast<std::uint64_t>(x));
  }
  return h;
}

TrainingData token_training_data(const std::vector<std::vector<std::string>>& transcriptions) {
  TrainingData data;
  data.vocab.mode = Mode::Token;
  data.vocab.symbols = abc::build_token_vocabulary(transcriptions);
  data.sequences.reserve(transcriptions.size());
  for (const auto& line : transcriptions) {
    std::vector<int> seq;
    seq.reserve(line.size());
    for (const auto& tok : line) seq.push_back(data.vocab.encode(tok));
    data.sequences.push_back(std::move(seq));
  }
  return data;
}

std::vector<std::string_view> split_char_entries(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '\n' && i + 1 < text.size() && text[i + 1] == '\n') {
      std::size_t end = i;
      while (end < text.size() && text[end] == '\n') ++end;
      out.push_back(text.substr(start, end - start));
      start = i = end;
    } else {
      ++i;
    }
  }
  if (start < text.size()) out.push_back(text.substr(start));
  return out;
}

TrainingData char_training_data(std::string_view text) {
  TrainingData data;
  data.vocab.mode = Mode::Char;
  data.vocab.symbols = abc::build_char_vocabulary(text);
  for (std::string_view entry : split_char_entries(text)) {
    std::vector<int> seq;
    for (const auto& ch : abc::utf8_chars(entry)) seq.push_back(data.vocab.encode(ch));
    data.sequences.push_back(std::move(seq));
  }
  return data;
}

DataSplit split_data(std::size_t n, std::uint64_t seed, double fraction) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  CounterRng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  std::size_t held = 0;
  if (n >= 2 && fraction > 0) {
    held = static_cast<std::size_t>(std::llround(static_cast<double>(n) * fraction));
    held = std::clamp<std::size_t>(held, 1, n - 1);
  }
  DataSplit split;
  split.validation.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(held));
  split.train.assign(order.begin() + static_cast<std::ptrdiff_t>(held), order.end());
  return split;
}

Schedule Schedule::char_default() {
  Schedule s;
  s.learning_rate = 0.002;
  s.decay = 0.95;
  s.decay_after = 10;
  s.batch = 50;
  s.seq_len = 50;
  return s;
}

Schedule Schedule::token_default() { return Schedule{}; }

double Schedule::lr_at(int epoch) const {
  return learning_rate * std::pow(decay, std::max(0, epoch - decay_after));
}

void Schedule::validate() const {
  if (epochs < 1) throw Error("schedule needs at least one epoch");
  if (!(learning_rate > 0)) throw Error("learning rate must be positive");
  if (!(decay > 0 && decay <= 1)) throw Error("decay must lie in (0, 1]");
  if (decay_after < 0) throw Error("decay threshold must be non-negative");
  if (batch < 1 || seq_len < 1) throw Error("batch and sequence length must be positive");
  if (!(clip > 0)) throw Error("clip bound must be positive");
  if (!(validation_fraction >= 0 && validation_fraction < 1)) throw Error("validation fraction must lie in [0, 1)");
}

std::string format_epoch_log(const EpochLog& log) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "epoch %4d  lr %.6g  train %.4f  val %.4f  wall %.2fs", log.epoch, log.lr,
                log.train_loss, log.validation_loss, log.wall_seconds);
  return buf;
}

}  // namespace tunelab::lm
