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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tunelab/abc/vocabulary.hpp"
#include "tunelab/lm/model.hpp"

namespace tunelab::lm {

// Text of the padding symbol appended to token vocabularies. It never occurs
// in a corpus and is never sampled.
inline constexpr std::string_view kNullSymbol = "<null>";

// Symbol table of a model. Token mode appends a null index after the corpus
// vocabulary; char mode has none.
struct ModelVocab {
  Mode mode = Mode::Token;
  abc::Vocabulary symbols;

  int size() const { return static_cast<int>(symbols.size()) + (mode == Mode::Token ? 1 : 0); }
  std::optional<int> null_index() const {
    if (mode != Mode::Token) return std::nullopt;
    return static_cast<int>(symbols.size());
  }
  // Throws Error naming the symbol when it is not in the vocabulary.
  int encode(std::string_view symbol) const { return static_cast<int>(symbols.encode(symbol)); }
  const std::string& decode(int index) const;

  friend bool operator==(const ModelVocab&, const ModelVocab&) = default;
};

// Encoded corpus: whole transcriptions (token mode) or blank-line separated
// entries including their delimiter (char mode).
struct TrainingData {
  ModelVocab vocab;
  std::vector<std::vector<int>> sequences;

  // FNV-1a over vocabulary and sequences; ties a checkpoint to its data.
  std::uint64_t fingerprint() const;
};

TrainingData token_training_data(const std::vector<std::vector<std::string>>& transcriptions);
TrainingData char_training_data(std::string_view text);

// Splits entries of `text` after every blank line. Concatenating the pieces
// gives back `text`.
std::vector<std::string_view> split_char_entries(std::string_view text);

struct DataSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// Seeded shuffle of [0, n), with round(n * fraction) items (at least one when
// n >= 2 and fraction > 0) held out for validation.
DataSplit split_data(std::size_t n, std::uint64_t seed, double fraction = 0.05);

struct Schedule {
  int epochs = 100;
  double learning_rate = 0.003;
  double decay = 0.97;
  int decay_after = 20;
  int batch = 64;
  int seq_len = 50;  // char mode only
  double clip = 5.0;
  double validation_fraction = 0.05;

  static Schedule char_default();   // 0.002, x0.95 past epoch 10, 50 x 50
  static Schedule token_default();  // 0.003, x0.97 past epoch 20, 64 transcriptions

  // Learning rate used during 1-based `epoch`: lr0 * decay^max(0, epoch - decay_after).
  double lr_at(int epoch) const;
  void validate() const;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

struct EpochLog {
  int epoch = 0;
  double lr = 0;
  double train_loss = 0;
  double validation_loss = 0;
  double wall_seconds = 0;

  friend bool operator==(const EpochLog&, const EpochLog&) = default;
};

std::string format_epoch_log(const EpochLog& log);

}  // namespace tunelab::lm
